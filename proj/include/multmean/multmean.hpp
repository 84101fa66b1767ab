#pragma once

// Convenience include for the whole library.

#include "multmean/functions.hpp"
#include "multmean/mean_value.hpp"
#include "multmean/numeric.hpp"
#include "multmean/primes.hpp"
#include "multmean/rational.hpp"
#include "multmean/series.hpp"
#include "multmean/special.hpp"
#include "multmean/summatory.hpp"
