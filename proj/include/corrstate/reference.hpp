#pragma once

#include "corrstate/correlation.hpp"
#include "corrstate/dataset.hpp"
#include "corrstate/indicators.hpp"

namespace corrstate::reference {

// Plain serial implementations of the same contracts, written as the
// straightforward textbook loops. They share no kernel code with the
// optimized paths and exist as the slow-but-obvious route for tests and for
// the benchmark baseline.

CorrelationMatrix correlation_serial(const Dataset& dataset, int t, WindowSpec spec,
                                     const CorrOptions& opts = {});

std::vector<double> indicator_rows_serial(const Dataset& dataset, int t, WindowSpec spec,
                                          const CorrOptions& opts = {});

IndicatorSeries indicator_series_serial(const Dataset& dataset, WindowSpec spec,
                                        const CorrOptions& opts = {});

}  // namespace corrstate::reference
