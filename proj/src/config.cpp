// SPDX-License-Identifier: Apache-2.0
#include "levylab/config.hpp"

#include <set>

#include "json.hpp"
#include "levylab/errors.hpp"

namespace levylab {

namespace {

using nlohmann::json;

class Loader {
  public:
    explicit Loader(const std::string& text) : text_(text) {}

    std::vector<std::string> load(ExperimentConfig& config) {
        config.raw = text_;
        json root;
        try {
            root = json::parse(text_);
        } catch (const json::parse_error& e) {
            note(std::string("config: ") + e.what());
            return diagnostics_;
        }
        if (!root.is_object()) {
            note("config: top level must be an object");
            return diagnostics_;
        }
        load_scalars(root, config);
        load_model(root, config);
        load_boxes(root, config);
        load_functionals(root, config);
        load_checks(root, config);
        load_path_dump(root, config);
        if (config.model) semantic_pass(config);
        return diagnostics_;
    }

  private:
    void note(std::string msg) { diagnostics_.push_back(std::move(msg)); }

    bool require(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) {
            note(where + ": missing required field '" + key + "'");
            return false;
        }
        return true;
    }

    double number(const json& obj, const char* key, const std::string& where,
                  double fallback, bool required = false) {
        if (!obj.contains(key)) {
            if (required) note(where + ": missing required field '" + key + "'");
            return fallback;
        }
        if (!obj[key].is_number()) {
            note(where + "." + key + ": expected a number");
            return fallback;
        }
        return obj[key].get<double>();
    }

    std::string text_field(const json& obj, const char* key,
                           const std::string& where, bool required = true) {
        if (!obj.contains(key)) {
            if (required)
                note(where + ": missing required field '" + key + "'");
            return {};
        }
        if (!obj[key].is_string()) {
            note(where + "." + key + ": expected a string");
            return {};
        }
        return obj[key].get<std::string>();
    }

    void load_scalars(const json& root, ExperimentConfig& config) {
        if (require(root, "seed", "config")) {
            if (!root["seed"].is_number_unsigned())
                note("config.seed: expected a non-negative integer "
                     "(explicit seeds only, no wall-clock seeding)");
            else
                config.seed = root["seed"].get<std::uint64_t>();
        }
        default_samples_ = static_cast<std::int64_t>(
            number(root, "samples", "config", 100000.0));
        default_sigmas_ = number(root, "sigmas", "config", 3.0);
        if (default_samples_ <= 0) note("config.samples: must be > 0");
        if (default_sigmas_ <= 0.0) note("config.sigmas: must be > 0");
    }

    void load_model(const json& root, ExperimentConfig& config) {
        if (!require(root, "model", "config")) return;
        const json& m = root["model"];
        if (!m.is_object()) {
            note("config.model: expected an object");
            return;
        }
        double drift = number(m, "drift", "model", 0.0);
        double horizon = number(m, "horizon", "model", 0.0, true);
        double sigma = number(m, "sigma", "model", 0.0);
        if (sigma != 0.0)
            note("model.sigma: out of scope (sigma must be 0; the Brownian "
                 "component is not supported)");
        std::vector<NuComponent> components;
        if (require(m, "components", "model") && m["components"].is_array()) {
            int index = 0;
            for (const json& c : m["components"]) {
                std::string where =
                    "model.components[" + std::to_string(index++) + "]";
                std::string kind = text_field(c, "kind", where);
                try {
                    if (kind == "atom") {
                        components.push_back(NuComponent::atom(
                            number(c, "x", where, 0.0, true),
                            number(c, "mass", where, 0.0, true)));
                    } else if (kind == "uniform") {
                        components.push_back(NuComponent::uniform(
                            number(c, "a", where, 0.0, true),
                            number(c, "b", where, 0.0, true),
                            number(c, "mass", where, 0.0, true)));
                    } else if (!kind.empty()) {
                        note(where + ".kind: unknown component kind '" + kind +
                             "' (expected atom or uniform)");
                    }
                } catch (const Error& e) {
                    note(where + ": " + e.what());
                }
            }
        }
        if (diagnostics_.empty()) {
            try {
                config.model.emplace(drift, horizon, sigma == 0.0 ? 0.0 : sigma,
                                     std::move(components));
            } catch (const Error& e) {
                note(std::string("model: ") + e.what());
            }
        }
    }

    void load_boxes(const json& root, ExperimentConfig& config) {
        if (!require(root, "boxes", "config")) return;
        const json& boxes = root["boxes"];
        if (!boxes.is_object()) {
            note("config.boxes: expected an object of name -> rect list");
            return;
        }
        double horizon = config.model ? config.model->horizon() : 0.0;
        for (const auto& [name, rect_list] : boxes.items()) {
            std::string where = "boxes." + name;
            if (!rect_list.is_array()) {
                note(where + ": expected a list of [t1, t2, x1, x2] rects");
                continue;
            }
            std::vector<Rect> rects;
            bool ok = true;
            for (const json& r : rect_list) {
                if (!r.is_array() || r.size() != 4 || !r[0].is_number() ||
                    !r[1].is_number() || !r[2].is_number() ||
                    !r[3].is_number()) {
                    note(where + ": each rect must be [t1, t2, x1, x2]");
                    ok = false;
                    break;
                }
                Rect rect{r[0].get<double>(), r[1].get<double>(),
                          r[2].get<double>(), r[3].get<double>()};
                if (config.model && rect.t2 > horizon + 1e-12) {
                    note(where + ": time side exceeds the horizon T=" +
                         std::to_string(horizon));
                    ok = false;
                }
                rects.push_back(rect);
            }
            if (!ok) continue;
            try {
                config.boxes.emplace(name, BoxSet(std::move(rects)));
            } catch (const Error& e) {
                note(where + ": " + e.what());
            }
        }
    }

    void load_functionals(const json& root, ExperimentConfig& config) {
        if (!root.contains("functionals")) return;
        if (!root["functionals"].is_object()) {
            note("config.functionals: expected an object of name -> source");
            return;
        }
        for (const auto& [name, source] : root["functionals"].items()) {
            std::string where = "functionals." + name;
            if (!source.is_string()) {
                note(where + ": expected a DSL source string");
                continue;
            }
            config.functional_sources[name] = source.get<std::string>();
            try {
                config.functionals.emplace(
                    name, parse_functional(source.get<std::string>()));
            } catch (const ParseError& e) {
                note(where + ": " + e.what());
            }
        }
    }

    // artifact names stay inside the output directory
    bool plain_file_name(const std::string& name) {
        return !name.empty() && name.front() != '/' &&
               name.find("..") == std::string::npos;
    }

    void check_artifact_name(const std::string& name,
                             const std::string& where) {
        if (!name.empty() && !plain_file_name(name))
            note(where + ": artifact file name must be relative and must "
                         "not contain '..'");
    }

    void load_path_dump(const json& root, ExperimentConfig& config) {
        if (!root.contains("path_dump")) return;
        const json& d = root["path_dump"];
        PathDumpSpec spec;
        spec.streams = static_cast<std::uint64_t>(
            number(d, "streams", "path_dump", 0.0, true));
        spec.file = text_field(d, "file", "path_dump");
        if (spec.streams == 0) note("path_dump.streams: must be > 0");
        if (spec.file.empty())
            note("path_dump.file: must be a file name");
        else
            check_artifact_name(spec.file, "path_dump.file");
        config.path_dump = spec;
    }

    template <typename T>
    std::optional<double> optional_number(const json& obj, const char* key,
                                          const std::string& where, T) {
        if (!obj.contains(key)) return std::nullopt;
        if (!obj[key].is_number()) {
            note(where + "." + key + ": expected a number");
            return std::nullopt;
        }
        return obj[key].get<double>();
    }

    CheckParams parse_params(const json& c, const std::string& kind,
                             const std::string& where) {
        auto opt = [&](const char* key) {
            return optional_number(c, key, where, 0);
        };
        if (kind == "mecke")
            return MeckeParams{text_field(c, "functional", where),
                               text_field(c, "box", where), opt("expect")};
        if (kind == "covariance")
            return CovarianceParams{text_field(c, "box1", where),
                                    text_field(c, "box2", where)};
        if (kind == "isometry")
            return IsometryParams{
                text_field(c, "box", where),
                static_cast<int>(number(c, "splits", where, 2.0))};
        if (kind == "orthogonality")
            return OrthogonalityParams{
                text_field(c, "box", where),
                static_cast<int>(number(c, "splits", where, 2.0))};
        if (kind == "sandwich")
            return SandwichParams{text_field(c, "functional", where),
                                  text_field(c, "box", where),
                                  opt("expect_a"), opt("expect_b"),
                                  opt("expect_d")};
        if (kind == "equivalence")
            return EquivalenceParams{text_field(c, "functional", where),
                                     text_field(c, "box", where)};
        if (kind == "weighted_norm")
            return WeightedNormParams{text_field(c, "functional", where),
                                      text_field(c, "box", where),
                                      number(c, "theta", where, 1.0),
                                      opt("expect")};
        if (kind == "k_surrogate")
            return KSurrogateParams{text_field(c, "functional", where),
                                    text_field(c, "box", where),
                                    number(c, "s", where, 1.0, true),
                                    opt("expect")};
        if (kind == "interpolation_band") {
            InterpolationBandParams p{text_field(c, "functional", where),
                                      text_field(c, "box", where),
                                      number(c, "theta", where, 0.5, true),
                                      text_field(c, "table", where, false)};
            check_artifact_name(p.table, where + ".table");
            return p;
        }
        if (kind == "fubini")
            return FubiniParams{text_field(c, "functional", where),
                                text_field(c, "box", where),
                                number(c, "theta", where, 0.5, true)};
        if (kind == "theta_integral")
            return ThetaIntegralParams{number(c, "theta", where, 0.5, true),
                                       number(c, "c", where, 1.0, true),
                                       number(c, "rel_tol", where, 1e-6)};
        if (kind == "classify") {
            ClassifyParams p;
            p.functional = text_field(c, "functional", where);
            p.box = text_field(c, "box", where);
            p.theta = number(c, "theta", where, 1.0);
            p.truncation = static_cast<std::int64_t>(
                number(c, "truncation", where, double(1 << 20)));
            if (c.contains("expect")) p.expect = text_field(c, "expect", where);
            p.table = text_field(c, "table", where, false);
            check_artifact_name(p.table, where + ".table");
            return p;
        }
        if (kind == "counterexample") {
            CounterexampleParams p;
            p.lambda = number(c, "lambda", where, 1.0, true);
            p.a = number(c, "a", where, 2.0, true);
            p.truncation = static_cast<std::int64_t>(
                number(c, "truncation", where, double(1 << 20)));
            p.table = text_field(c, "table", where, false);
            check_artifact_name(p.table, where + ".table");
            return p;
        }
        if (kind == "phi_star")
            return PhiStarParams{number(c, "lambda", where, 1.0, true),
                                 opt("expect"),
                                 number(c, "tol", where, 1e-4)};
        if (kind == "young")
            return YoungParams{
                static_cast<int>(number(c, "points", where, 64.0)),
                number(c, "range", where, 10.0)};
        if (kind == "product_rule")
            return ProductRuleParams{
                text_field(c, "f", where), text_field(c, "g", where),
                static_cast<std::int64_t>(number(c, "trials", where, 1000.0)),
                number(c, "rel_tol", where, 1e-12)};
        if (kind == "chain_rule") {
            ChainRuleParams p;
            p.functional = text_field(c, "functional", where);
            p.g = text_field(c, "g", where);
            p.lo = number(c, "lo", where, -1.0);
            p.hi = number(c, "hi", where, 1.0);
            p.c = number(c, "c", where, 0.0);
            p.trials = static_cast<std::int64_t>(
                number(c, "trials", where, 1000.0));
            p.rel_tol = number(c, "rel_tol", where, 1e-12);
            return p;
        }
        if (kind == "derivative_norm")
            return DerivativeNormParams{text_field(c, "functional", where),
                                        text_field(c, "box", where),
                                        opt("expect")};
        if (kind == "l2log")
            return L2LogParams{text_field(c, "functional", where),
                               opt("expect")};
        note(where + ".kind: unknown check kind '" + kind + "'");
        return MeckeParams{};
    }

    void load_checks(const json& root, ExperimentConfig& config) {
        if (!require(root, "checks", "config")) return;
        if (!root["checks"].is_array()) {
            note("config.checks: expected an array");
            return;
        }
        std::set<std::string> names;
        int index = 0;
        for (const json& c : root["checks"]) {
            std::string where = "checks[" + std::to_string(index++) + "]";
            CheckSpec spec;
            spec.name = text_field(c, "name", where);
            if (!spec.name.empty() && !names.insert(spec.name).second)
                note(where + ".name: duplicate check name '" + spec.name + "'");
            if (spec.name.find_first_of(",\n\r") != std::string::npos)
                note(where + ".name: must not contain commas or line breaks "
                             "(it keys the CSV report)");
            spec.kind = text_field(c, "kind", where);
            if (c.contains("seed") && c["seed"].is_number_unsigned())
                spec.seed = c["seed"].get<std::uint64_t>();
            else if (c.contains("seed"))
                note(where + ".seed: expected a non-negative integer");
            else
                note(where + ": missing required field 'seed' (seeds are "
                     "explicit, no wall-clock seeding)");
            spec.samples = static_cast<std::int64_t>(
                number(c, "samples", where, double(default_samples_)));
            if (spec.samples <= 0) note(where + ".samples: must be > 0");
            spec.sigmas = number(c, "sigmas", where, default_sigmas_);
            if (spec.sigmas <= 0.0) note(where + ".sigmas: must be > 0");
            if (!spec.kind.empty())
                spec.params = parse_params(c, spec.kind, where);
            config.checks.push_back(std::move(spec));
        }
    }

    // name resolution, ranges and measurability; runs once the model exists
    void semantic_pass(ExperimentConfig& config) {
        auto box_ok = [&](const std::string& name, const std::string& where) {
            if (name.empty()) return false;
            if (config.boxes.count(name) == 0) {
                note(where + ": undeclared box '" + name + "'");
                return false;
            }
            return true;
        };
        auto functional_ok = [&](const std::string& name,
                                 const std::string& where) {
            if (name.empty()) return false;
            if (config.functionals.count(name) == 0) {
                note(where + ": undeclared functional '" + name + "'");
                return false;
            }
            return true;
        };
        auto certified = [&](const std::string& fname,
                             const std::string& bname,
                             const std::string& where) {
            const Functional& f = config.functionals.at(fname);
            auto report = measurability(f, *config.model, config.boxes,
                                        config.boxes.at(bname));
            if (!report.certified) {
                std::string what = where + ": functional '" + fname +
                                   "' is not certified F_A-measurable for "
                                   "box '" + bname + "'; offending reads:";
                for (const auto& o : report.offending) what += " " + o;
                note(what);
            }
        };
        auto boxes_resolve = [&](const Functional& f,
                                 const std::string& where) {
            for (const std::string& b : f.boxes_read())
                if (config.boxes.count(b) == 0)
                    note(where + ": functional references undeclared box '" +
                         b + "'");
        };
        for (const auto& [name, f] : config.functionals)
            boxes_resolve(f, "functionals." + name);

        for (const CheckSpec& check : config.checks) {
            std::string where = "checks['" + check.name + "']";
            std::visit(
                [&](const auto& p) {
                    using T = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, MeckeParams> ||
                                  std::is_same_v<T, SandwichParams> ||
                                  std::is_same_v<T, EquivalenceParams> ||
                                  std::is_same_v<T, DerivativeNormParams>) {
                        bool ok = functional_ok(p.functional, where) &&
                                  box_ok(p.box, where);
                        if constexpr (std::is_same_v<T, EquivalenceParams>) {
                            if (ok) certified(p.functional, p.box, where);
                        }
                        (void)ok;
                    } else if constexpr (std::is_same_v<T, CovarianceParams>) {
                        box_ok(p.box1, where);
                        box_ok(p.box2, where);
                    } else if constexpr (std::is_same_v<T, IsometryParams> ||
                                         std::is_same_v<T,
                                                        OrthogonalityParams>) {
                        box_ok(p.box, where);
                        if (p.splits < 1)
                            note(where + ".splits: must be >= 1");
                    } else if constexpr (std::is_same_v<T,
                                                        WeightedNormParams>) {
                        functional_ok(p.functional, where);
                        box_ok(p.box, where);
                        if (p.theta < 0.0 || p.theta > 1.0)
                            note(where + ".theta: must lie in [0, 1]");
                    } else if constexpr (std::is_same_v<T, KSurrogateParams>) {
                        functional_ok(p.functional, where);
                        box_ok(p.box, where);
                        if (!(p.s > 0.0)) note(where + ".s: must be > 0");
                    } else if constexpr (
                        std::is_same_v<T, InterpolationBandParams> ||
                        std::is_same_v<T, FubiniParams>) {
                        functional_ok(p.functional, where);
                        box_ok(p.box, where);
                        if (!(p.theta > 0.0 && p.theta < 1.0))
                            note(where + ".theta: must lie in (0, 1)");
                    } else if constexpr (std::is_same_v<T,
                                                        ThetaIntegralParams>) {
                        if (!(p.theta > 0.0 && p.theta < 1.0))
                            note(where + ".theta: must lie in (0, 1)");
                        if (!(p.c > 0.0)) note(where + ".c: must be > 0");
                    } else if constexpr (std::is_same_v<T, ClassifyParams>) {
                        bool ok = functional_ok(p.functional, where) &&
                                  box_ok(p.box, where);
                        if (!(p.theta > 0.0 && p.theta <= 1.0))
                            note(where + ".theta: must lie in (0, 1]");
                        if (p.truncation < 16)
                            note(where + ".truncation: must be >= 16");
                        if (p.expect != "finite" && p.expect != "divergent" &&
                            p.expect != "inconclusive")
                            note(where + ".expect: must be finite, divergent "
                                         "or inconclusive");
                        if (ok) certified(p.functional, p.box, where);
                    } else if constexpr (std::is_same_v<T,
                                                        CounterexampleParams>) {
                        if (!(p.a > 1.0 && p.a <= 2.0))
                            note(where + ".a: must lie in (1, 2]");
                        if (!(p.lambda > 0.0))
                            note(where + ".lambda: must be > 0");
                        if (p.truncation < 4096)
                            note(where + ".truncation: must be >= 4096");
                    } else if constexpr (std::is_same_v<T, PhiStarParams>) {
                        if (!(p.lambda > 0.0))
                            note(where + ".lambda: must be > 0");
                    } else if constexpr (std::is_same_v<T, YoungParams>) {
                        if (p.points < 2) note(where + ".points: must be >= 2");
                        if (!(p.range > 0.0))
                            note(where + ".range: must be > 0");
                    } else if constexpr (std::is_same_v<T, ProductRuleParams>) {
                        functional_ok(p.f, where);
                        functional_ok(p.g, where);
                        if (p.trials <= 0)
                            note(where + ".trials: must be > 0");
                    } else if constexpr (std::is_same_v<T, ChainRuleParams>) {
                        functional_ok(p.functional, where);
                        if (p.g != "abs" && p.g != "clamp" && p.g != "min" &&
                            p.g != "max")
                            note(where +
                                 ".g: must be abs, clamp, min or max");
                        if (p.g == "clamp" && p.lo > p.hi)
                            note(where + ": clamp bounds out of order");
                        if (p.trials <= 0)
                            note(where + ".trials: must be > 0");
                    } else if constexpr (std::is_same_v<T, L2LogParams>) {
                        functional_ok(p.functional, where);
                    }
                },
                check.params);
        }
    }

    const std::string& text_;
    std::vector<std::string> diagnostics_;
    std::int64_t default_samples_ = 100000;
    double default_sigmas_ = 3.0;
};

}  // namespace

std::vector<std::string> validate_config(const std::string& text,
                                         ExperimentConfig* out) {
    ExperimentConfig local;
    ExperimentConfig& config = out ? *out : local;
    Loader loader(text);
    return loader.load(config);
}

ExperimentConfig load_config(const std::string& text) {
    ExperimentConfig config;
    auto diagnostics = validate_config(text, &config);
    if (!diagnostics.empty())
        throw ConfigError(diagnostics.front(), "config");
    return config;
}

}  // namespace levylab
