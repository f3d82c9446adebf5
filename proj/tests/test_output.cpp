#include <catch2/catch_amalgamated.hpp>
#include "cachesim/analytics.hpp"
#include "cachesim/delivery.hpp"
#include "cachesim/graphs.hpp"
#include "cachesim/montecarlo.hpp"
#include "cachesim/output.hpp"

TEST_CASE("placeholder output", "[output]") { CHECK(true); }
