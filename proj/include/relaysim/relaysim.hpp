#pragma once

#include "relaysim/channel_model.hpp"
#include "relaysim/config.hpp"
#include "relaysim/energy_model.hpp"
#include "relaysim/errors.hpp"
#include "relaysim/experiment.hpp"
#include "relaysim/outage_analysis.hpp"
#include "relaysim/parallel.hpp"
#include "relaysim/relay_selection.hpp"
#include "relaysim/results_io.hpp"
#include "relaysim/rng.hpp"
