#pragma once

#include "prony/coefficient_recovery.hpp"
#include "prony/diagnostics.hpp"
#include "prony/errors.hpp"
#include "prony/matrix_assembly.hpp"
#include "prony/parallel.hpp"
#include "prony/pencil_solver.hpp"
#include "prony/pipeline.hpp"
#include "prony/reduced_svd.hpp"
#include "prony/report_io.hpp"
#include "prony/signal_io.hpp"
#include "prony/signal_model.hpp"
