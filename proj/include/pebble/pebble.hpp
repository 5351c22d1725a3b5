#pragma once

#include "pebble/catalog.hpp"
#include "pebble/configuration.hpp"
#include "pebble/covering.hpp"
#include "pebble/follower.hpp"
#include "pebble/graph.hpp"
#include "pebble/leader.hpp"
#include "pebble/oracle.hpp"
#include "pebble/orchestrator.hpp"
#include "pebble/pipeline.hpp"
#include "pebble/symmetry.hpp"
#include "pebble/vertex_set.hpp"
