#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mlsg/model.hpp"
#include "mlsg/riccati.hpp"
#include "mlsg/strategies.hpp"

namespace mlsg {

/// One-parameter sensitivity sweep: re-solve the game for each value of the
/// swept parameter and collect selected strategy-coefficient trajectories.
struct SweepSpec {
    enum class Parameter { c0, delta_constant };
    ModelParams base;
    Parameter parameter = Parameter::c0;
    std::vector<double> values;
    /// Coefficient names from the strategy CSV header:
    /// w_x, w_0, p_x, p_0, I_sx, I_s0, I_bx, I_b0.
    std::vector<std::string> outputs;

    void validate() const;
};

struct SweepGroup {
    double value = 0.0;
    bool existence_ok = true;
    double eta = 0.0;
    /// coefficient name -> trajectory on the sweep mesh; empty if blow-up.
    std::map<std::string, std::vector<double>> trajectories;
};

struct SweepResult {
    SweepSpec spec;
    TimeMesh mesh;
    std::vector<SweepGroup> groups; ///< ordered as spec.values
};

const char* sweep_parameter_name(SweepSpec::Parameter p);

/// Solves per value; a blow-up marks that group incomplete and the sweep
/// continues. Coefficient names are validated up front.
SweepResult run_sweep(const SweepSpec& spec, const TimeMesh& mesh);

/// Long-format CSV: parameter_value,t,coefficient_name,coefficient_value.
/// Incomplete groups contribute no rows. Byte-stable across reruns.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// Reads a long-format sweep CSV back; throws std::runtime_error carrying
/// the 1-based line number on malformed input.
struct SweepTable {
    /// coefficient name -> (parameter value -> curve as (t, value) pairs),
    /// both levels ordered by first appearance in the file.
    std::vector<std::string> coefficients;
    std::vector<double> values;
    std::map<std::string, std::map<double, std::vector<std::pair<double, double>>>> curves;
};
SweepTable read_sweep_csv(std::istream& is);

/// Writes one deterministic SVG line plot per coefficient found in the CSV,
/// curves keyed by parameter value, named fig_<coefficient>_<param>.svg.
/// Returns the paths written (empty selection produces no files).
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& sweep_csv,
                                              const std::filesystem::path& out_dir,
                                              const std::string& param_name);

} // namespace mlsg
