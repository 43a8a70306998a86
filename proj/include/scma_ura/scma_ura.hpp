#pragma once

#include "analysis.hpp"
#include "barring.hpp"
#include "codebook.hpp"
#include "config.hpp"
#include "decoder.hpp"
#include "error.hpp"
#include "reference.hpp"
#include "rng.hpp"
#include "sim.hpp"
#include "traffic.hpp"
