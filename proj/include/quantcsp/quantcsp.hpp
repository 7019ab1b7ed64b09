#pragma once

#include "quantcsp/errors.hpp"
#include "quantcsp/rational.hpp"
#include "quantcsp/quantale.hpp"
#include "quantcsp/finset.hpp"
#include "quantcsp/qmorphism.hpp"
#include "quantcsp/csp.hpp"
#include "quantcsp/dimacs.hpp"
#include "quantcsp/polymorphism.hpp"
#include "quantcsp/qpoly.hpp"
#include "quantcsp/tvcsp.hpp"
#include "quantcsp/simplex.hpp"
#include "quantcsp/linopt.hpp"
