#include "ontic/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace ontic {

namespace {

json complex_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("expected a [re, im] pair");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

json to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected an amplitude array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) =
        complex_from_json(j[i]);
    return v;
}

json to_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(complex_to_json(m(r, c)));
    return json{{"dim", m.rows()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
    const auto d = j.at("dim").get<Eigen::Index>();
    const json& data = j.at("data");
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != d * d)
        throw std::invalid_argument("matrix data length != dim^2");
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = complex_from_json(data[static_cast<std::size_t>(r * d + c)]);
    return m;
}

json to_json(const PureState& s) { return json{{"amplitudes", to_json(s.amplitudes())}}; }

PureState state_from_json(const json& j) {
    return PureState(vector_from_json(j.at("amplitudes")));
}

json to_json(const Context& c) {
    json basis = json::array();
    for (int i = 0; i < c.dim(); ++i) basis.push_back(to_json(c.basis_vector(i).amplitudes()));
    return json{{"label", c.label()}, {"basis", basis}};
}

Context context_from_json(const json& j) {
    std::vector<PureState> basis;
    for (const auto& b : j.at("basis")) basis.emplace_back(vector_from_json(b));
    return Context(std::move(basis), j.at("label").get<std::string>());
}

json to_json(const Povm& p) {
    json effects = json::array();
    for (const auto& e : p.effects()) effects.push_back(to_json(e));
    return json{{"quantity", p.quantity_label()},
                {"outcomes", p.outcome_labels()},
                {"effects", effects}};
}

Povm povm_from_json(const json& j) {
    std::vector<Matrix> effects;
    for (const auto& e : j.at("effects")) effects.push_back(matrix_from_json(e));
    return Povm(std::move(effects), j.at("outcomes").get<std::vector<std::string>>(),
                j.at("quantity").get<std::string>());
}

json to_json(const Preparation& p) {
    json out{{"label", p.label}, {"rho", to_json(p.rho)}};
    if (p.pure) out["pure"] = to_json(p.pure->amplitudes());
    return out;
}

Preparation preparation_from_json(const json& j) {
    const std::string label = j.at("label").get<std::string>();
    if (j.contains("pure"))
        return Preparation::from_pure(label, PureState(vector_from_json(j.at("pure"))));
    return Preparation::from_density(label, matrix_from_json(j.at("rho")));
}

json to_json(const Fragment& f) {
    json preps = json::array(), povms = json::array();
    for (const auto& p : f.preparations) preps.push_back(to_json(p));
    for (const auto& m : f.measurements) povms.push_back(to_json(m));
    return json{{"dim", f.dim}, {"preparations", preps}, {"measurements", povms}};
}

Fragment fragment_from_json(const json& j) {
    Fragment f;
    f.dim = j.at("dim").get<int>();
    for (const auto& p : j.at("preparations")) f.preparations.push_back(preparation_from_json(p));
    for (const auto& m : j.at("measurements")) f.measurements.push_back(povm_from_json(m));
    f.validate();
    return f;
}

json to_json(const OnticSpace& s) { return json{{"labels", s.labels}}; }

OnticSpace space_from_json(const json& j) {
    OnticSpace s;
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.validate();
    return s;
}

json to_json(const ResponseFunction& r) {
    json table = json::array();
    for (Eigen::Index row = 0; row < r.table.rows(); ++row) {
        json cells = json::array();
        for (Eigen::Index col = 0; col < r.table.cols(); ++col)
            cells.push_back(r.table(row, col));
        table.push_back(cells);
    }
    return json{{"quantity", r.quantity_label}, {"outcomes", r.outcome_labels},
                {"table", table}};
}

ResponseFunction response_from_json(const json& j) {
    ResponseFunction r;
    r.quantity_label = j.at("quantity").get<std::string>();
    r.outcome_labels = j.at("outcomes").get<std::vector<std::string>>();
    const json& table = j.at("table");
    const Eigen::Index rows = static_cast<Eigen::Index>(table.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(r.outcome_labels.size());
    r.table = RealMatrix(rows, cols);
    for (Eigen::Index row = 0; row < rows; ++row) {
        const json& cells = table[static_cast<std::size_t>(row)];
        if (static_cast<Eigen::Index>(cells.size()) != cols)
            throw std::invalid_argument("response table row length mismatch");
        for (Eigen::Index col = 0; col < cols; ++col)
            r.table(row, col) = cells[static_cast<std::size_t>(col)].get<double>();
    }
    return r;
}

json to_json(const EpistemicState& e) {
    json weights = json::array();
    for (Eigen::Index i = 0; i < e.weights.size(); ++i) weights.push_back(e.weights(i));
    return json{{"preparation", e.preparation_label}, {"weights", weights}};
}

EpistemicState epistemic_from_json(const json& j) {
    EpistemicState e;
    e.preparation_label = j.at("preparation").get<std::string>();
    const json& w = j.at("weights");
    e.weights = RealVector(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        e.weights(static_cast<Eigen::Index>(i)) = w[i].get<double>();
    return e;
}

json to_json(const OnticModel& m) {
    json responses = json::array();
    for (const auto& r : m.responses) responses.push_back(to_json(r));
    json epistemic = json::object();
    for (const auto& [label, states] : m.epistemic_map) {
        json list = json::array();
        for (const auto& e : states) list.push_back(to_json(e));
        epistemic[label] = list;
    }
    return json{{"fragment", to_json(m.fragment)},
                {"space", to_json(m.space)},
                {"responses", responses},
                {"epistemic", epistemic}};
}

OnticModel model_from_json(const json& j) {
    OnticModel m;
    m.fragment = fragment_from_json(j.at("fragment"));
    m.space = space_from_json(j.at("space"));
    for (const auto& r : j.at("responses")) m.responses.push_back(response_from_json(r));
    for (const auto& [label, list] : j.at("epistemic").items())
        for (const auto& e : list) m.epistemic_map[label].push_back(epistemic_from_json(e));
    m.validate_structure();
    return m;
}

json gudder_to_json(const gudder::Model& m) {
    json contexts = json::array();
    for (const auto& c : m.contexts.contexts()) contexts.push_back(to_json(c));
    json preps = json::array();
    for (std::size_t i = 0; i < m.preparations.size(); ++i)
        preps.push_back(json{{"label", m.preparation_labels[i]},
                             {"amplitudes", to_json(m.preparations[i].amplitudes())}});
    return json{{"dim", m.contexts.dim()}, {"contexts", contexts}, {"preparations", preps}};
}

gudder::Model gudder_from_json(const json& j) {
    const int dim = j.at("dim").get<int>();
    std::vector<Context> contexts;
    for (const auto& c : j.at("contexts")) contexts.push_back(context_from_json(c));
    std::vector<PureState> states;
    std::vector<std::string> labels;
    for (const auto& p : j.at("preparations")) {
        labels.push_back(p.at("label").get<std::string>());
        states.emplace_back(vector_from_json(p.at("amplitudes")));
    }
    return gudder::build_gudder(gudder::ContextList(dim, std::move(contexts)),
                                std::move(states), std::move(labels));
}

json mkc_set_to_json(const mkc::ContextSet& s) {
    json contexts = json::array(), targets = json::array();
    for (const auto& c : s.contexts) contexts.push_back(to_json(c));
    for (const auto& t : s.targets) targets.push_back(to_json(t));
    return json{{"dim", s.dim},       {"epsilon", s.epsilon},
                {"tau", s.tau},       {"seed", s.seed},
                {"contexts", contexts}, {"precisions", s.precisions},
                {"margins", s.margins}, {"targets", targets}};
}

mkc::ContextSet mkc_set_from_json(const json& j) {
    mkc::ContextSet s;
    s.dim = j.at("dim").get<int>();
    s.epsilon = j.at("epsilon").get<double>();
    s.tau = j.at("tau").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("contexts")) s.contexts.push_back(context_from_json(c));
    s.precisions = j.at("precisions").get<std::vector<double>>();
    s.margins = j.at("margins").get<std::vector<double>>();
    for (const auto& t : j.at("targets")) s.targets.push_back(context_from_json(t));
    if (s.precisions.size() != s.contexts.size() || s.margins.size() != s.contexts.size())
        throw std::invalid_argument("mkc set: precision/margin lists do not match contexts");
    return s;
}

json to_json(const ValidationReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"preparation", row.preparation},
                            {"quantity", row.quantity},
                            {"outcome", row.outcome},
                            {"epistemic_index", row.epistemic_index},
                            {"model_probability", row.model_probability},
                            {"born_probability", row.born_probability},
                            {"residual", row.residual}});
    return json{{"rows", rows},
                {"max_residual", r.max_residual},
                {"tolerance", r.tolerance},
                {"pass", r.pass}};
}

json to_json(const OnticityReport& r) {
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back(json{{"psi", p.psi},
                             {"phi", p.phi},
                             {"distance", p.distance},
                             {"bound_used", p.bound_used}});
    json out{{"pairs", pairs},
             {"min_distance", r.min_distance},
             {"gap_to_one", 1.0 - r.min_distance},
             {"tolerance", r.tolerance},
             {"verdict", r.psi_ontic ? "psi-ontic" : "psi-epistemic"}};
    if (!r.psi_ontic && !r.witness_psi.empty())
        out["witness"] = json{{"psi", r.witness_psi}, {"phi", r.witness_phi}};
    return out;
}

json to_json(const DeterminatenessReport& r) {
    json disjoint = json::array(), measures = json::array();
    for (const auto& f : r.disjoint_failures)
        disjoint.push_back(json{{"psi", f.psi}, {"phi", f.phi}, {"shared", f.shared_states}});
    for (const auto& f : r.measure_failures)
        measures.push_back(json{{"label", f.label},
                                {"epistemic_index", f.epistemic_index},
                                {"measure", f.measure}});
    return json{{"disjoint_failures", disjoint},
                {"measure_failures", measures},
                {"min_measures", r.min_measures},
                {"tolerance", r.tolerance},
                {"pass", r.pass}};
}

json to_json(const AntidistinguishabilityCertificate& c) {
    json states = json::array();
    for (const auto& s : c.states) states.push_back(to_json(s));
    return json{{"states", states},
                {"povm", to_json(c.povm)},
                {"residuals", c.residuals},
                {"max_residual", c.max_residual},
                {"tolerance", c.tolerance},
                {"valid", c.valid}};
}

json to_json(const PerturbationReport& r) {
    return json{{"eta", r.eta},
                {"trials", r.trials},
                {"max_residuals", r.max_residuals},
                {"median_max_residual", r.median_max_residual},
                {"smallest_max_residual", r.smallest_max_residual},
                {"largest_max_residual", r.largest_max_residual}};
}

json to_json(const DiscriminationReport& r) {
    return json{{"shots", r.shots},
                {"successes", r.successes},
                {"empirical_rate", r.empirical_rate},
                {"analytic_rate", r.analytic_rate},
                {"tv", r.tv},
                {"exact_tv", r.exact_tv},
                {"band", r.band},
                {"within_band", r.within_band}};
}

json to_json(const mkc::FinitePrecisionReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"preparation", row.preparation},
                            {"observable", row.observable},
                            {"context_index", row.context_index},
                            {"snap_defect", row.snap_defect},
                            {"analytic_l1", row.analytic_l1},
                            {"empirical_l1", row.empirical_l1},
                            {"sampling_band", row.sampling_band},
                            {"pass", row.pass}});
    return json{{"rows", rows},
                {"max_analytic_l1", r.max_analytic_l1},
                {"max_empirical_l1", r.max_empirical_l1},
                {"analytic_bound", r.analytic_bound},
                {"shots", r.shots},
                {"ontic_state_count", r.ontic_state_count},
                {"determinateness_note", r.determinateness_note},
                {"pass", r.pass}};
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) body_ += ',';
        body_ += columns[i];
    }
    body_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw std::invalid_argument("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

std::string CsvWriter::format(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string validation_csv(const ValidationReport& r) {
    CsvWriter csv({"preparation", "quantity", "outcome", "epistemic_index",
                   "model_probability", "born_probability", "residual"});
    for (const auto& row : r.rows)
        csv.add_row({row.preparation, row.quantity, row.outcome,
                     CsvWriter::format(row.epistemic_index),
                     CsvWriter::format(row.model_probability),
                     CsvWriter::format(row.born_probability), CsvWriter::format(row.residual)});
    return csv.str();
}

std::string onticity_pairs_csv(const OnticityReport& r) {
    CsvWriter csv({"psi", "phi", "distance", "bound_used"});
    for (const auto& p : r.pairs)
        csv.add_row({p.psi, p.phi, CsvWriter::format(p.distance), p.bound_used ? "1" : "0"});
    return csv.str();
}

std::string trajectory_csv(const std::vector<gudder::TrajectoryRow>& rows,
                           const std::string& psi, const std::string& phi) {
    CsvWriter csv({"psi", "phi", "k", "exact_tv", "tv_lower_bound", "overlap_upper_bound"});
    for (const auto& row : rows)
        csv.add_row({psi, phi, CsvWriter::format(row.k),
                     row.exact_available ? CsvWriter::format(row.exact_tv) : "",
                     CsvWriter::format(row.tv_lower_bound),
                     CsvWriter::format(row.overlap_upper_bound)});
    return csv.str();
}

std::string mkc_trajectory_csv(const std::vector<mkc::TrajectoryRow>& rows) {
    CsvWriter csv({"n", "K", "q_n", "mu_psi", "mu_phi", "euler_lower_bound"});
    for (const auto& row : rows)
        csv.add_row({CsvWriter::format(row.n), CsvWriter::format(row.K),
                     CsvWriter::format(row.q_n), CsvWriter::format(row.mu_psi),
                     CsvWriter::format(row.mu_phi), CsvWriter::format(row.euler_lower_bound)});
    return csv.str();
}

std::string determinateness_csv(const DeterminatenessReport& r) {
    CsvWriter csv({"label", "min_measure", "tolerance", "pass"});
    for (const auto& [label, measure] : r.min_measures)
        csv.add_row({label, CsvWriter::format(measure), CsvWriter::format(r.tolerance),
                     measure >= 1.0 - r.tolerance ? "1" : "0"});
    return csv.str();
}

std::string perturbation_csv(const PerturbationReport& r) {
    CsvWriter csv({"trial", "eta", "max_residual"});
    for (std::size_t i = 0; i < r.max_residuals.size(); ++i)
        csv.add_row({CsvWriter::format(static_cast<int>(i)), CsvWriter::format(r.eta),
                     CsvWriter::format(r.max_residuals[i])});
    return csv.str();
}

std::string discrimination_csv(const std::vector<DiscriminationReport>& runs) {
    CsvWriter csv({"shots", "empirical_rate", "analytic_rate", "band"});
    for (const auto& r : runs)
        csv.add_row({CsvWriter::format(r.shots), CsvWriter::format(r.empirical_rate),
                     CsvWriter::format(r.analytic_rate), CsvWriter::format(r.band)});
    return csv.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    json j;
    in >> j;
    return j;
}

}  // namespace ontic
