#pragma once

// Umbrella header for the whole toolkit.

#include "spikeforge/adam.hpp"
#include "spikeforge/checkpoint.hpp"
#include "spikeforge/dataset.hpp"
#include "spikeforge/detect.hpp"
#include "spikeforge/layers.hpp"
#include "spikeforge/metrics.hpp"
#include "spikeforge/model.hpp"
#include "spikeforge/recording_io.hpp"
#include "spikeforge/rng.hpp"
#include "spikeforge/signal.hpp"
#include "spikeforge/synth.hpp"
#include "spikeforge/tensor.hpp"
#include "spikeforge/train.hpp"
