#pragma once

#include "tnbpa/core_model.hpp"
#include "tnbpa/decomposition_base.hpp"
#include "tnbpa/differential.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/generator.hpp"
#include "tnbpa/norm.hpp"
#include "tnbpa/normalization.hpp"
#include "tnbpa/normed_string.hpp"
#include "tnbpa/oracle.hpp"
#include "tnbpa/refinement.hpp"
#include "tnbpa/verification.hpp"
