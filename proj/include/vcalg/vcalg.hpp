#pragma once

#include "vcalg/bareiss.hpp"
#include "vcalg/covariates.hpp"
#include "vcalg/errors.hpp"
#include "vcalg/interval.hpp"
#include "vcalg/multipoly.hpp"
#include "vcalg/oneway_ml.hpp"
#include "vcalg/oneway_reml.hpp"
#include "vcalg/oneway_stats.hpp"
#include "vcalg/profile.hpp"
#include "vcalg/rational.hpp"
#include "vcalg/roots.hpp"
#include "vcalg/twoway.hpp"
#include "vcalg/unipoly.hpp"
