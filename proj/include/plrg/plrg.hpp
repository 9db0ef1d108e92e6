#pragma once

// Single include for the whole library.

#include "plrg/rng.hpp"
#include "plrg/parallel.hpp"
#include "plrg/dist.hpp"
#include "plrg/hard_graph.hpp"
#include "plrg/graphex.hpp"
#include "plrg/stats.hpp"
#include "plrg/height.hpp"
#include "plrg/graphon.hpp"
#include "plrg/bernoulli.hpp"
#include "plrg/harness.hpp"
