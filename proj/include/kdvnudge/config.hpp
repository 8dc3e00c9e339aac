#pragma once

#include <map>
#include <string>
#include <vector>

#include "kdvnudge/assimilation.hpp"
#include "kdvnudge/attractor.hpp"
#include "kdvnudge/bounds.hpp"

namespace kdv {

// Flat sectioned key-value configuration ("[section]" headers, "key = value"
// lines, '#' comments). Unknown sections or keys are rejected; every default
// is resolved at parse time so the serialized form echoes the full
// configuration.
class RunConfig {
public:
    static RunConfig defaults();
    static RunConfig parse(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    void set(const std::string& dotted_key, const std::string& value);  // "section.key=value"
    std::string serialize() const;

    const std::string& raw(const std::string& dotted_key) const;
    double get_double(const std::string& dotted_key) const;
    int get_int(const std::string& dotted_key) const;
    std::uint64_t get_u64(const std::string& dotted_key) const;
    bool get_bool(const std::string& dotted_key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }
    bool operator==(const RunConfig&) const = default;

    // Typed views (validated).
    GridSpec grid() const;
    SpectralField forcing(const GridSpec& g) const;
    ModelParams model() const;
    AssimilationConfig assimilation() const;
    ProbeConfig probe() const;
    bounds::BoundInputs bound_inputs() const;  // forcing norms resolved if unset
    DFormOptions dform_options() const;
    std::vector<ForcingMode> forcing_modes() const;

    void validate() const;

private:
    std::map<std::string, std::string> values_;
};

struct SweepGrid {
    std::vector<double> values;
};
SweepGrid parse_sweep_grid(const std::string& spec);
std::vector<bounds::Cond> parse_condition_list(const std::string& spec);

}  // namespace kdv
