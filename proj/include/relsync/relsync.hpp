#pragma once

#include "relsync/channel.hpp"
#include "relsync/child_solver.hpp"
#include "relsync/clock.hpp"
#include "relsync/crc32.hpp"
#include "relsync/io.hpp"
#include "relsync/metrics.hpp"
#include "relsync/packet.hpp"
#include "relsync/pseudo_clock_filter.hpp"
#include "relsync/random.hpp"
#include "relsync/ranging.hpp"
#include "relsync/runlog.hpp"
#include "relsync/scenario.hpp"
#include "relsync/scenario_io.hpp"
#include "relsync/scheduler.hpp"
#include "relsync/sim.hpp"
#include "relsync/topology.hpp"
#include "relsync/trajectory.hpp"
#include "relsync/types.hpp"
