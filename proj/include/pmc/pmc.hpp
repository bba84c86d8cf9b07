#pragma once

#include "pmc/asymptotics.hpp"
#include "pmc/chart.hpp"
#include "pmc/error.hpp"
#include "pmc/extension.hpp"
#include "pmc/hfield.hpp"
#include "pmc/integrator.hpp"
#include "pmc/io.hpp"
#include "pmc/product_quadrature.hpp"
#include "pmc/residual.hpp"
#include "pmc/singular_lm.hpp"
#include "pmc/singular_rot.hpp"
#include "pmc/types.hpp"
