#pragma once

#include "broker.hpp"
#include "datacenter.hpp"
#include "event_queue.hpp"
#include "experiment.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "simulation.hpp"
#include "topology.hpp"
#include "types.hpp"
#include "workload.hpp"
