#pragma once

#include "qql/bounds.hpp"
#include "qql/errors.hpp"
#include "qql/io.hpp"
#include "qql/linalg.hpp"
#include "qql/optimizer.hpp"
#include "qql/oracle.hpp"
#include "qql/pgm.hpp"
#include "qql/polynomial.hpp"
#include "qql/reference.hpp"
#include "qql/report.hpp"
#include "qql/simulator.hpp"
#include "qql/walsh.hpp"
