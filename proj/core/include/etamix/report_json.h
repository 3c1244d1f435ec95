#ifndef ETAMIX_REPORT_JSON_H_
#define ETAMIX_REPORT_JSON_H_

#include <string>

#include <nlohmann/json.hpp>

#include "etamix/matrix.h"
#include "etamix/mixing.h"
#include "etamix/montecarlo.h"
#include "etamix/process_model.h"

namespace etamix {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const MixingMatrix& m);
nlohmann::json to_json(const ProcessModel& model);
nlohmann::json to_json(const TheoremReport& report);
nlohmann::json to_json(const TailReport& report);

// Columns: t, empirical, stderr, bound_bruteforce_raw,
// bound_bruteforce_capped, bound_theorem_raw, bound_theorem_capped.
std::string to_csv(const TailReport& report);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace etamix

#endif  // ETAMIX_REPORT_JSON_H_
