#pragma once

// Umbrella header: the whole library in dependency order.

#include "affectfuse/errors.hpp"
#include "affectfuse/labels.hpp"
#include "affectfuse/observation.hpp"
#include "affectfuse/mapping.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/metrics.hpp"
#include "affectfuse/rng.hpp"
#include "affectfuse/sessions.hpp"
#include "affectfuse/simulator.hpp"
#include "affectfuse/io.hpp"
#include "affectfuse/version.hpp"
