#pragma once

#include "roperc/association.hpp"
#include "roperc/corpus.hpp"
#include "roperc/dyadic.hpp"
#include "roperc/graph.hpp"
#include "roperc/graph_sim.hpp"
#include "roperc/joint.hpp"
#include "roperc/poisson.hpp"
#include "roperc/tree_analytics.hpp"
#include "roperc/tree_sim.hpp"
#include "roperc/upsets.hpp"
#include "roperc/vertex_set.hpp"
