// doctest runner for the unit suites; each module registers its own
// TEST_SUITE and ctest invokes this binary once per suite.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
