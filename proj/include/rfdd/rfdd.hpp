#pragma once

// Umbrella header for the RHVI-FDD enhancement library.

#include "rfdd/color.hpp"
#include "rfdd/dct.hpp"
#include "rfdd/degrade.hpp"
#include "rfdd/fdd.hpp"
#include "rfdd/irm.hpp"
#include "rfdd/metrics.hpp"
#include "rfdd/nn.hpp"
#include "rfdd/pipeline.hpp"
#include "rfdd/rng.hpp"
#include "rfdd/tensor.hpp"
#include "rfdd/weights.hpp"
