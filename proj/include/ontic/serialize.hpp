#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ontic/distinguish.hpp"
#include "ontic/gudder.hpp"
#include "ontic/mkc.hpp"
#include "ontic/ontic_model.hpp"

namespace ontic {

using json = nlohmann::json;

// Interchange conventions: complex numbers as [re, im] pairs, square matrices
// row-major under "data".

json to_json(const Vector& v);
Vector vector_from_json(const json& j);

json to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json to_json(const PureState& s);
PureState state_from_json(const json& j);

json to_json(const Context& c);
Context context_from_json(const json& j);

json to_json(const Povm& p);
Povm povm_from_json(const json& j);

json to_json(const Preparation& p);
Preparation preparation_from_json(const json& j);

json to_json(const Fragment& f);
Fragment fragment_from_json(const json& j);

json to_json(const OnticSpace& s);
OnticSpace space_from_json(const json& j);

json to_json(const ResponseFunction& r);
ResponseFunction response_from_json(const json& j);

json to_json(const EpistemicState& e);
EpistemicState epistemic_from_json(const json& j);

json to_json(const OnticModel& m);
OnticModel model_from_json(const json& j);

/// Gudder model description: {dim, contexts, preparations}.
json gudder_to_json(const gudder::Model& m);
gudder::Model gudder_from_json(const json& j);

json mkc_set_to_json(const mkc::ContextSet& s);
mkc::ContextSet mkc_set_from_json(const json& j);

// Report serialization (one-way).
json to_json(const ValidationReport& r);
json to_json(const OnticityReport& r);
json to_json(const DeterminatenessReport& r);
json to_json(const AntidistinguishabilityCertificate& c);
json to_json(const PerturbationReport& r);
json to_json(const DiscriminationReport& r);
json to_json(const mkc::FinitePrecisionReport& r);

/// Minimal CSV accumulator with deterministic %.17g float formatting.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);
    void add_row(const std::vector<std::string>& cells);
    std::string str() const { return body_; }
    static std::string format(double x);
    static std::string format(long long x) { return std::to_string(x); }
    static std::string format(int x) { return std::to_string(x); }

  private:
    std::size_t width_;
    std::string body_;
};

std::string validation_csv(const ValidationReport& r);
std::string onticity_pairs_csv(const OnticityReport& r);
std::string trajectory_csv(const std::vector<gudder::TrajectoryRow>& rows,
                           const std::string& psi, const std::string& phi);
std::string mkc_trajectory_csv(const std::vector<mkc::TrajectoryRow>& rows);
std::string determinateness_csv(const DeterminatenessReport& r);
std::string perturbation_csv(const PerturbationReport& r);
std::string discrimination_csv(const std::vector<DiscriminationReport>& runs);

/// Writes through a temp file and renames, so outputs appear atomically.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

json load_json_file(const std::filesystem::path& path);

}  // namespace ontic
