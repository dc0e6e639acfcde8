#include "gravity/design.hpp"

#include "gravity/csv.hpp"
#include "gravity/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gravity {

// ---------------------------------------------------------------------------
// Enum names

std::string to_string(Specification s) {
    return s == Specification::disaggregated ? "disaggregated" : "eq1-blocs";
}
std::string to_string(ResponseTransform r) {
    return r == ResponseTransform::log ? "log" : "level";
}
std::string to_string(PopulationMode p) {
    switch (p) {
        case PopulationMode::level: return "level";
        case PopulationMode::log: return "log";
        case PopulationMode::omit: return "omit";
    }
    return "level";
}
std::string to_string(ZeroPolicy z) {
    return z == ZeroPolicy::drop ? "drop" : "keep";
}
std::string to_string(EstimatorKind e) {
    return e == EstimatorKind::ols ? "ols" : "ppml";
}

Specification parse_specification(const std::string& text) {
    if (text == "disaggregated") return Specification::disaggregated;
    if (text == "eq1-blocs" || text == "eq1_blocs") return Specification::eq1_blocs;
    throw DomainError("unknown specification '" + text +
                      "' (expected disaggregated or eq1-blocs)");
}
ResponseTransform parse_response(const std::string& text) {
    if (text == "log") return ResponseTransform::log;
    if (text == "level") return ResponseTransform::level;
    throw DomainError("unknown response transform '" + text +
                      "' (expected log or level)");
}
PopulationMode parse_population_mode(const std::string& text) {
    if (text == "level") return PopulationMode::level;
    if (text == "log") return PopulationMode::log;
    if (text == "omit") return PopulationMode::omit;
    throw DomainError("unknown population mode '" + text +
                      "' (expected level, log, or omit)");
}
ZeroPolicy parse_zero_policy(const std::string& text) {
    if (text == "drop") return ZeroPolicy::drop;
    if (text == "keep") return ZeroPolicy::keep;
    throw DomainError("unknown zero policy '" + text + "' (expected drop or keep)");
}
EstimatorKind parse_estimator(const std::string& text) {
    if (text == "ols") return EstimatorKind::ols;
    if (text == "ppml") return EstimatorKind::ppml;
    throw DomainError("unknown estimator '" + text + "' (expected ols or ppml)");
}

// ---------------------------------------------------------------------------
// ModelSpec

void ModelSpec::validate() const {
    if (response == ResponseTransform::log && zero_policy == ZeroPolicy::keep)
        throw DomainError("response=log requires zero_policy=drop "
                          "(log of a zero flow is undefined)");
    if (estimator == EstimatorKind::ppml && response == ResponseTransform::log)
        throw DomainError("estimator=ppml requires response=level "
                          "(PPML fits the multiplicative form)");
}

ModelSpec ModelSpec::defaults_for(EstimatorKind kind) {
    ModelSpec spec;
    spec.estimator = kind;
    if (kind == EstimatorKind::ppml) {
        spec.response = ResponseTransform::level;
        spec.zero_policy = ZeroPolicy::keep;
    } else {
        spec.response = ResponseTransform::log;
        spec.zero_policy = ZeroPolicy::drop;
    }
    return spec;
}

// ---------------------------------------------------------------------------
// DesignMatrix

int DesignMatrix::column(const std::string& label) const {
    auto it = std::find(column_labels.begin(), column_labels.end(), label);
    return it == column_labels.end() ? -1
                                     : static_cast<int>(it - column_labels.begin());
}

namespace {

std::string obs_name(const PairObservation& o) {
    return "observation (" + std::to_string(o.year) + ", " + o.i + ", " + o.j + ")";
}

double checked_log(double v, const PairObservation& o, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(obs_name(o) + ": " + what + " must be strictly positive, got " +
                          std::to_string(v));
    return std::log(v);
}

} // namespace

DesignMatrix build_design(std::span<const PairObservation> obs, const ModelSpec& spec) {
    spec.validate();
    if (obs.empty()) throw DomainError("cannot build a design from zero observations");
    for (const PairObservation& o : obs) {
        if (o.year != obs.front().year || o.sector != obs.front().sector)
            throw DomainError("observations must share one (year, sector); found (" +
                              std::to_string(obs.front().year) + ", " +
                              to_string(obs.front().sector) + ") and (" +
                              std::to_string(o.year) + ", " + to_string(o.sector) + ")");
        if (o.trade_value < 0.0 || !std::isfinite(o.trade_value))
            throw DomainError(obs_name(o) + ": negative or non-finite trade value");
    }

    DesignMatrix d;
    d.column_labels.push_back("_cons");
    if (spec.specification == Specification::disaggregated) {
        d.column_labels.insert(d.column_labels.end(),
                               {"log_gdpa", "log_gdpb", "log_dis", "adj",
                                "samelanguage", "freetradezone"});
        switch (spec.population_mode) {
            case PopulationMode::level:
                d.column_labels.insert(d.column_labels.end(),
                                       {"populationa", "populationb"});
                break;
            case PopulationMode::log:
                d.column_labels.insert(d.column_labels.end(),
                                       {"log_populationa", "log_populationb"});
                break;
            case PopulationMode::omit:
                break;
        }
    } else {
        d.column_labels.insert(d.column_labels.end(),
                               {"log_gnp_product", "log_percap_product", "log_dis",
                                "adjacent", "EA", "EC", "NAFTA"});
    }
    d.response_label =
        spec.response == ResponseTransform::log ? "log_trade" : "trade";

    const bool drop_zeros = spec.response == ResponseTransform::log;
    std::vector<const PairObservation*> rows;
    rows.reserve(obs.size());
    for (const PairObservation& o : obs) {
        if (o.trade_value == 0.0 && drop_zeros) {
            // validate() already rejected log/keep; every zero here is a drop.
            ++d.dropped_zero_count;
            continue;
        }
        rows.push_back(&o);
    }
    if (rows.empty())
        throw DomainError("all " + std::to_string(obs.size()) +
                          " observations have zero flows; nothing to fit under response=log");

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto k = static_cast<Eigen::Index>(d.column_labels.size());
    d.X.resize(n, k);
    d.y.resize(n);
    d.row_keys.reserve(rows.size());

    for (Eigen::Index r = 0; r < n; ++r) {
        const PairObservation& o = *rows[static_cast<std::size_t>(r)];
        d.row_keys.push_back({o.i, o.j, o.year});
        d.y(r) = spec.response == ResponseTransform::log
                     ? checked_log(o.trade_value, o, "trade value under response=log")
                     : o.trade_value;
        Eigen::Index c = 0;
        d.X(r, c++) = 1.0;
        if (spec.specification == Specification::disaggregated) {
            d.X(r, c++) = checked_log(o.gdp_i, o, "gdp_i");
            d.X(r, c++) = checked_log(o.gdp_j, o, "gdp_j");
            d.X(r, c++) = checked_log(o.distance_km, o, "distance");
            d.X(r, c++) = o.adjacent;
            d.X(r, c++) = o.same_language;
            d.X(r, c++) = o.shared_free_trade;
            switch (spec.population_mode) {
                case PopulationMode::level:
                    d.X(r, c++) = o.pop_i;
                    d.X(r, c++) = o.pop_j;
                    break;
                case PopulationMode::log:
                    d.X(r, c++) = checked_log(o.pop_i, o, "pop_i");
                    d.X(r, c++) = checked_log(o.pop_j, o, "pop_j");
                    break;
                case PopulationMode::omit:
                    break;
            }
        } else {
            // Product form: log(GNP_i GNP_j), log of the per-capita product,
            // and the three named bloc dummies.
            d.X(r, c++) = checked_log(o.gdp_i, o, "gdp_i") +
                          checked_log(o.gdp_j, o, "gdp_j");
            d.X(r, c++) = checked_log(o.gdp_i, o, "gdp_i") -
                          checked_log(o.pop_i, o, "pop_i") +
                          checked_log(o.gdp_j, o, "gdp_j") -
                          checked_log(o.pop_j, o, "pop_j");
            d.X(r, c++) = checked_log(o.distance_km, o, "distance");
            d.X(r, c++) = o.adjacent;
            d.X(r, c++) = o.shared_blocs.count("EA") ? 1.0 : 0.0;
            d.X(r, c++) = o.shared_blocs.count("EC") ? 1.0 : 0.0;
            d.X(r, c++) = o.shared_blocs.count("NAFTA") ? 1.0 : 0.0;
        }
    }
    return d;
}

std::vector<ColumnStats> column_summary(const DesignMatrix& d) {
    if (d.n() == 0) throw DomainError("column_summary over an empty design");
    std::vector<ColumnStats> out;
    for (Eigen::Index c = 0; c < d.k(); ++c) {
        ColumnStats s;
        s.label = d.column_labels[static_cast<std::size_t>(c)];
        s.is_intercept = s.label == "_cons";
        s.min = d.X.col(c).minCoeff();
        s.max = d.X.col(c).maxCoeff();
        s.mean = d.X.col(c).mean();
        s.zero_variance = s.min == s.max;
        out.push_back(std::move(s));
    }
    return out;
}

void write_design_csv(const DesignMatrix& d, std::ostream& os) {
    std::vector<std::string> header{"i", "j", "year", d.response_label};
    header.insert(header.end(), d.column_labels.begin(), d.column_labels.end());
    csv::write_row(os, header);
    for (Eigen::Index r = 0; r < d.n(); ++r) {
        const PairKey& key = d.row_keys[static_cast<std::size_t>(r)];
        std::vector<std::string> row{key.i, key.j, std::to_string(key.year),
                                     csv::fmt_exact(d.y(r))};
        for (Eigen::Index c = 0; c < d.k(); ++c)
            row.push_back(csv::fmt_exact(d.X(r, c)));
        csv::write_row(os, row);
    }
}

} // namespace gravity
