#pragma once

#include "texbank/classify.hpp"
#include "texbank/csv.hpp"
#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"
#include "texbank/fft.hpp"
#include "texbank/fractal.hpp"
#include "texbank/gabor.hpp"
#include "texbank/glcm.hpp"
#include "texbank/gmrf.hpp"
#include "texbank/image.hpp"
#include "texbank/pipeline.hpp"
#include "texbank/quantize.hpp"
#include "texbank/rlm.hpp"
#include "texbank/synth.hpp"
