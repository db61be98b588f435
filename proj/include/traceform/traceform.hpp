#pragma once

#include "traceform/ball.hpp"
#include "traceform/config.hpp"
#include "traceform/errors.hpp"
#include "traceform/graph1d.hpp"
#include "traceform/kato.hpp"
#include "traceform/kernels.hpp"
#include "traceform/measures.hpp"
#include "traceform/potentials.hpp"
#include "traceform/report.hpp"
#include "traceform/spectra.hpp"
#include "traceform/stationary.hpp"
