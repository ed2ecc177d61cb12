#pragma once

// Umbrella header for the copy-move forgery detection library.

#include "cmfd/audio.hpp"
#include "cmfd/benchmark.hpp"
#include "cmfd/config.hpp"
#include "cmfd/constellation.hpp"
#include "cmfd/detector.hpp"
#include "cmfd/error.hpp"
#include "cmfd/fft.hpp"
#include "cmfd/forgery_lab.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/probability.hpp"
#include "cmfd/report.hpp"
#include "cmfd/spectrogram.hpp"
#include "cmfd/synth.hpp"
#include "cmfd/tensors.hpp"
