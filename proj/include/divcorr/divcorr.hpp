#pragma once

#include "divcorr/arith.hpp"
#include "divcorr/asymptotics.hpp"
#include "divcorr/characters.hpp"
#include "divcorr/correlations.hpp"
#include "divcorr/error.hpp"
#include "divcorr/identities.hpp"
#include "divcorr/multiplicative.hpp"
#include "divcorr/parallel.hpp"
#include "divcorr/scalar.hpp"
#include "divcorr/table_io.hpp"
