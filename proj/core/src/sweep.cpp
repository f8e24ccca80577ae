#include "mlsg/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "mlsg/csv.hpp"
#include "mlsg/svg.hpp"

namespace mlsg {

namespace {

const std::vector<std::string>& coefficient_names() {
    static const std::vector<std::string> names = {"w_x",  "w_0",  "p_x",  "p_0",
                                                   "I_sx", "I_s0", "I_bx", "I_b0"};
    return names;
}

std::string normalize_coefficient(const std::string& raw) {
    // Accept the lowercase spellings (i_sx etc.) as aliases of the CSV names.
    std::string name = raw;
    if (name.rfind("i_", 0) == 0) name[0] = 'I';
    const auto& names = coefficient_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw std::invalid_argument("sweep: unknown coefficient name '" + raw + "'");
    return name;
}

const std::vector<double>& trajectory_of(const StrategyCoefficients& c,
                                         const std::string& name) {
    if (name == "w_x") return c.w_x;
    if (name == "w_0") return c.w_0;
    if (name == "p_x") return c.p_x;
    if (name == "p_0") return c.p_0;
    if (name == "I_sx") return c.i_sx;
    if (name == "I_s0") return c.i_s0;
    if (name == "I_bx") return c.i_bx;
    return c.i_b0;
}

ModelParams apply_value(const SweepSpec& spec, double value) {
    ModelParams p = spec.base;
    switch (spec.parameter) {
    case SweepSpec::Parameter::c0:
        p.c0 = value;
        break;
    case SweepSpec::Parameter::delta_constant:
        if (!(value > 0.0))
            throw std::invalid_argument("sweep: delta values must be > 0");
        p.delta = TimeCurve::constant(value, 0.0, p.horizon);
        break;
    }
    return p;
}

} // namespace

const char* sweep_parameter_name(SweepSpec::Parameter p) {
    return p == SweepSpec::Parameter::c0 ? "c0" : "delta";
}

void SweepSpec::validate() const {
    base.validate();
    if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
    std::set<double> distinct(values.begin(), values.end());
    if (distinct.size() != values.size())
        throw std::invalid_argument("sweep: values must be distinct");
    for (const auto& name : outputs) normalize_coefficient(name);
}

SweepResult run_sweep(const SweepSpec& spec, const TimeMesh& mesh) {
    spec.validate();
    mesh.validate();

    std::vector<std::string> outputs;
    outputs.reserve(spec.outputs.size());
    for (const auto& name : spec.outputs) outputs.push_back(normalize_coefficient(name));

    SweepResult result;
    result.spec = spec;
    result.mesh = mesh;
    result.groups.reserve(spec.values.size());

    for (double value : spec.values) {
        const ModelParams params = apply_value(spec, value);
        SweepGroup group;
        group.value = value;
        const RiccatiSolution sol = solve_riccati(params, mesh);
        group.existence_ok = sol.existence_ok;
        group.eta = sol.eta;
        if (sol.existence_ok) {
            const StrategyCoefficients coeffs = strategy_coefficients(params, sol);
            for (const auto& name : outputs)
                group.trajectories[name] = trajectory_of(coeffs, name);
        }
        result.groups.push_back(std::move(group));
    }
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "parameter_value,t,coefficient_name,coefficient_value\n";
    std::vector<std::string> outputs;
    for (const auto& name : result.spec.outputs) outputs.push_back(normalize_coefficient(name));
    for (const auto& group : result.groups) {
        if (!group.existence_ok) continue;
        for (const auto& name : outputs) {
            const auto it = group.trajectories.find(name);
            if (it == group.trajectories.end()) continue;
            for (int k = 0; k < result.mesh.node_count(); ++k) {
                os << format_g17(group.value) << ',' << format_g17(result.mesh.node(k))
                   << ',' << name << ',' << format_g17(it->second[k]) << '\n';
            }
        }
    }
}

SweepTable read_sweep_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line))
        throw std::runtime_error("sweep csv: empty input");
    ++line_no;
    if (line != "parameter_value,t,coefficient_name,coefficient_value")
        throw std::runtime_error("sweep csv line 1: unexpected header");

    SweepTable table;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw std::runtime_error("sweep csv line " + std::to_string(line_no) +
                                     ": expected 4 fields");
        const double value = parse_csv_double(fields[0], line_no);
        const double t = parse_csv_double(fields[1], line_no);
        const std::string& coef = fields[2];
        const double y = parse_csv_double(fields[3], line_no);
        if (coef.empty())
            throw std::runtime_error("sweep csv line " + std::to_string(line_no) +
                                     ": empty coefficient name");
        if (std::find(table.coefficients.begin(), table.coefficients.end(), coef) ==
            table.coefficients.end())
            table.coefficients.push_back(coef);
        if (std::find(table.values.begin(), table.values.end(), value) ==
            table.values.end())
            table.values.push_back(value);
        table.curves[coef][value].emplace_back(t, y);
    }
    return table;
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& sweep_csv,
                                              const std::filesystem::path& out_dir,
                                              const std::string& param_name) {
    std::ifstream in(sweep_csv);
    if (!in) throw std::runtime_error("emit_plots: cannot open " + sweep_csv.string());
    const SweepTable table = read_sweep_csv(in);

    std::vector<std::filesystem::path> written;
    for (const auto& coef : table.coefficients) {
        std::vector<SvgSeries> series;
        for (double value : table.values) {
            const auto vit = table.curves.at(coef).find(value);
            if (vit == table.curves.at(coef).end()) continue;
            SvgSeries s;
            s.label = param_name + "=" + format_g17(value);
            s.x.reserve(vit->second.size());
            s.y.reserve(vit->second.size());
            for (const auto& [t, y] : vit->second) {
                s.x.push_back(t);
                s.y.push_back(y);
            }
            series.push_back(std::move(s));
        }
        const std::filesystem::path out =
            out_dir / ("fig_" + coef + "_" + param_name + ".svg");
        std::ofstream os(out);
        if (!os) throw std::runtime_error("emit_plots: cannot write " + out.string());
        write_line_plot_svg(os, coef + " vs t (" + param_name + " sweep)", "t", coef,
                            series);
        written.push_back(out);
    }
    return written;
}

} // namespace mlsg
