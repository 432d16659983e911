#pragma once

#include "config.hpp"

#include "catpremium/pipeline.hpp"
#include "catpremium/schedule.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace catpremium::cli {

enum ExitCode { kOk = 0, kInfeasible = 1, kConfigOrIo = 2 };

int exit_code_for(ErrorKind kind);

/// Loads stats, and the panel, policies and forecasts when present, from the
/// output directory of a previous ingest (and train-risk) run.
PricingInputs load_inputs(const RunConfig& c);

int cmd_ingest(const RunConfig& c, std::ostream& out);
int cmd_train_risk(const RunConfig& c, std::ostream& out);
int cmd_price(const RunConfig& c, Scheme scheme, std::ostream& out);
/// Empty `schemes` means every scheme.
int cmd_sweep(const RunConfig& c, const std::vector<Scheme>& schemes, std::ostream& out);

}  // namespace catpremium::cli
