#include "anobench/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "anobench/csv.hpp"
#include "anobench/rng.hpp"
#include "anobench/stats.hpp"

namespace anobench {

using nlohmann::json;

Dataset make_series(std::int64_t t0, std::span<const double> values) {
    Schema schema;
    schema.attributes = {{kTimeAttr, AttributeKind::Continuous},
                         {kValueAttr, AttributeKind::Continuous}};
    schema.dependency = kTimeAttr;
    Dataset series(schema);
    for (std::size_t i = 0; i < values.size(); ++i) {
        series.append_row({static_cast<double>(t0 + static_cast<std::int64_t>(i)),
                           values[i]});
    }
    return series;
}

void require_series(const Dataset& dataset) {
    const auto& schema = dataset.schema();
    if (!schema.dependency) {
        throw ValidationError("series: schema has no dependency attribute");
    }
    const std::size_t t = schema.index_of(*schema.dependency);
    if (schema.attributes[t].kind != AttributeKind::Continuous) {
        throw ValidationError("series: dependency attribute must be numeric");
    }
    if (schema.count(AttributeKind::Continuous) < 2) {
        throw ValidationError("series: needs a continuous value attribute");
    }
    const auto times = dataset.continuous(t);
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] != times[i - 1] + 1.0) {
            throw ValidationError("series: time must be gap-free and increasing");
        }
    }
}

namespace {

std::size_t time_attr(const Dataset& series) {
    return series.schema().index_of(*series.schema().dependency);
}

std::size_t value_attr(const Dataset& series) {
    const std::size_t t = time_attr(series);
    for (std::size_t a : series.schema().indices_of(AttributeKind::Continuous)) {
        if (a != t) return a;
    }
    throw ValidationError("series: no value attribute");
}

}  // namespace

std::vector<double> series_values(const Dataset& series) {
    require_series(series);
    const auto v = series.continuous(value_attr(series));
    return {v.begin(), v.end()};
}

Dataset generate_series(std::size_t n, double slope, double amplitude,
                        std::size_t period, double noise, std::uint64_t seed) {
    if (period < 2) throw ParamError("generate_series: period must be >= 2");
    if (n < 2 * period) {
        throw ParamError("generate_series: need n >= 2 * period");
    }
    if (noise < 0.0) throw ParamError("generate_series: noise must be >= 0");
    Rng rng(seed);
    std::vector<double> values(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double seasonal =
            amplitude * std::sin(2.0 * std::numbers::pi *
                                 static_cast<double>(t) /
                                 static_cast<double>(period));
        const double eps = noise > 0.0 ? noise * rng.normal() : 0.0;
        values[t] = slope * static_cast<double>(t) + seasonal + eps;
    }
    return make_series(0, values);
}

std::string_view to_string(SeriesAnomalyKind kind) {
    switch (kind) {
        case SeriesAnomalyKind::Additive: return "additive";
        case SeriesAnomalyKind::TransitoryChange: return "transitory_change";
        case SeriesAnomalyKind::LevelShift: return "level_shift";
        case SeriesAnomalyKind::Innovational: return "innovational";
        case SeriesAnomalyKind::DeviantCycle: return "deviant_cycle";
    }
    throw ParamError("invalid series anomaly kind");
}

SeriesAnomalyKind series_anomaly_kind_from_string(std::string_view s) {
    if (s == "additive") return SeriesAnomalyKind::Additive;
    if (s == "transitory_change") return SeriesAnomalyKind::TransitoryChange;
    if (s == "level_shift") return SeriesAnomalyKind::LevelShift;
    if (s == "innovational") return SeriesAnomalyKind::Innovational;
    if (s == "deviant_cycle") return SeriesAnomalyKind::DeviantCycle;
    throw ParamError("unknown series anomaly kind: '" + std::string(s) + "'");
}

void SeriesAnomalySpec::validate(std::size_t series_length) const {
    const auto n = static_cast<std::int64_t>(series_length);
    switch (kind) {
        case SeriesAnomalyKind::Additive:
        case SeriesAnomalyKind::TransitoryChange:
        case SeriesAnomalyKind::LevelShift:
        case SeriesAnomalyKind::Innovational:
            if (t0 < 0 || t0 >= n) {
                throw ParamError("series anomaly: t0 out of range");
            }
            break;
        case SeriesAnomalyKind::DeviantCycle:
            break;
    }
    if (kind == SeriesAnomalyKind::TransitoryChange &&
        !(decay > 0.0 && decay < 1.0)) {
        throw ParamError("series anomaly: decay must lie in (0,1)");
    }
    if (kind == SeriesAnomalyKind::Innovational && amplitude_delta != 0.0 &&
        period < 2) {
        throw ParamError("series anomaly: innovational seasonal change needs a period");
    }
    if (kind == SeriesAnomalyKind::DeviantCycle) {
        if (period < 2) {
            throw ParamError("series anomaly: deviant cycle needs a period >= 2");
        }
        if ((cycle_index + 1) * period > series_length) {
            throw ParamError("series anomaly: cycle_index does not address a "
                             "complete cycle");
        }
    }
}

SeriesInjection inject_series_anomaly(const Dataset& series,
                                      const SeriesAnomalySpec& spec,
                                      std::uint64_t seed) {
    require_series(series);
    std::vector<double> values = series_values(series);
    spec.validate(values.size());
    const auto n = values.size();
    std::vector<std::size_t> affected;

    switch (spec.kind) {
        case SeriesAnomalyKind::Additive: {
            values[spec.t0] += spec.magnitude;
            affected.push_back(static_cast<std::size_t>(spec.t0));
            break;
        }
        case SeriesAnomalyKind::TransitoryChange: {
            // A spike that takes some time to disappear: geometric decay.
            for (std::size_t t = spec.t0; t < n; ++t) {
                const double offset =
                    spec.magnitude *
                    std::pow(spec.decay, static_cast<double>(
                                             t - static_cast<std::size_t>(spec.t0)));
                values[t] += offset;
                if (std::abs(offset) >= 0.05 * std::abs(spec.magnitude)) {
                    affected.push_back(t);
                }
            }
            break;
        }
        case SeriesAnomalyKind::LevelShift: {
            for (std::size_t t = spec.t0; t < n; ++t) values[t] += spec.magnitude;
            // The anomaly is the transition; later points conform to the
            // new level.
            affected.push_back(static_cast<std::size_t>(spec.t0));
            break;
        }
        case SeriesAnomalyKind::Innovational: {
            for (std::size_t t = spec.t0; t < n; ++t) {
                const double dt =
                    static_cast<double>(t - static_cast<std::size_t>(spec.t0));
                double extra = spec.slope_delta * dt;
                if (spec.amplitude_delta != 0.0) {
                    extra += spec.amplitude_delta *
                             std::sin(2.0 * std::numbers::pi * dt /
                                      static_cast<double>(spec.period));
                }
                values[t] += extra;
            }
            affected.push_back(static_cast<std::size_t>(spec.t0));
            break;
        }
        case SeriesAnomalyKind::DeviantCycle: {
            // Re-order the cycle's own values: every value stays inside the
            // global range, only the shape changes.
            const std::size_t begin = spec.cycle_index * spec.period;
            std::vector<double> cycle(values.begin() + begin,
                                      values.begin() + begin + spec.period);
            Rng rng(seed);
            std::vector<double> shuffled = cycle;
            for (int attempt = 0; attempt < 100; ++attempt) {
                rng.shuffle(shuffled);
                if (shuffled != cycle) break;
            }
            for (std::size_t i = 0; i < spec.period; ++i) {
                values[begin + i] = shuffled[i];
                affected.push_back(begin + i);
            }
            break;
        }
    }

    SeriesInjection out;
    const auto t0_time = series.continuous(time_attr(series))[0];
    out.series = make_series(static_cast<std::int64_t>(t0_time), values);

    // Global extremeness of the affected points on the modified series (MAD
    // convention, k = 3) decides how the external label maps onto the grid.
    const ContinuousStats st = continuous_stats(values);
    bool globally_extreme = false;
    for (std::size_t t : affected) {
        if (robust_deviation(values[t], st.median, st.mad) > 3.0) {
            globally_extreme = true;
        }
    }
    out.mapped = map_external({ExternalSource::Kaiser,
                               std::string(to_string(spec.kind))},
                              {globally_extreme, true});

    json params;
    params["kind"] = std::string(to_string(spec.kind));
    params["t0"] = spec.t0;
    params["magnitude"] = spec.magnitude;
    params["globally_extreme"] = globally_extreme;
    const AnomalyType mapped_type = *out.mapped.begin();
    for (std::size_t t : affected) {
        TruthEntry entry;
        entry.case_id = out.series.case_id(t);
        entry.type = mapped_type;
        entry.attributes = {kValueAttr};
        entry.params_json = params.dump();
        out.truth.entries.push_back(std::move(entry));
    }
    return out;
}

Dataset difference(const Dataset& series) {
    require_series(series);
    const auto values = series_values(series);
    if (values.size() < 2) {
        throw ValidationError("difference: need at least 2 points");
    }
    std::vector<double> diff(values.size() - 1);
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
        diff[t] = values[t + 1] - values[t];
    }
    return make_series(0, diff);
}

Dataset undifference(const Dataset& diff, double initial) {
    require_series(diff);
    const auto deltas = series_values(diff);
    std::vector<double> values(deltas.size() + 1);
    values[0] = initial;
    for (std::size_t t = 0; t < deltas.size(); ++t) {
        values[t + 1] = values[t] + deltas[t];
    }
    return make_series(0, values);
}

Dataset segment_cycles(const Dataset& series, std::size_t period, double cutoff) {
    require_series(series);
    if (period < 2) throw ParamError("segment_cycles: period must be >= 2");
    const auto values = series_values(series);
    if (period > values.size()) {
        throw ParamError("segment_cycles: period exceeds series length");
    }
    const std::size_t n_cycles = values.size() / period;

    if (cutoff <= 0.0) {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        cutoff = 0.25 * (*mx - *mn) * std::sqrt(static_cast<double>(period));
    }

    // Nearest-centroid assignment over raw cycle vectors; a cycle farther
    // than the cutoff from every class centroid starts a new class.
    struct Shape {
        std::vector<double> centroid;
        std::size_t members = 0;
    };
    std::vector<Shape> shapes;
    std::vector<std::size_t> assignment(n_cycles);
    for (std::size_t c = 0; c < n_cycles; ++c) {
        const double* cycle = values.data() + c * period;
        double best = 0.0;
        std::size_t best_shape = shapes.size();
        for (std::size_t s = 0; s < shapes.size(); ++s) {
            double sq = 0.0;
            for (std::size_t i = 0; i < period; ++i) {
                const double d = cycle[i] - shapes[s].centroid[i];
                sq += d * d;
            }
            const double dist = std::sqrt(sq);
            if (best_shape == shapes.size() || dist < best) {
                best = dist;
                best_shape = s;
            }
        }
        if (best_shape == shapes.size() || best > cutoff) {
            shapes.push_back({{cycle, cycle + period}, 1});
            assignment[c] = shapes.size() - 1;
        } else {
            auto& shape = shapes[best_shape];
            // Running-mean centroid update.
            const double w = static_cast<double>(shape.members);
            for (std::size_t i = 0; i < period; ++i) {
                shape.centroid[i] = (shape.centroid[i] * w + cycle[i]) / (w + 1.0);
            }
            ++shape.members;
            assignment[c] = best_shape;
        }
    }

    Schema schema;
    schema.attributes = {{"cycle", AttributeKind::Continuous},
                         {"mean", AttributeKind::Continuous},
                         {"min", AttributeKind::Continuous},
                         {"max", AttributeKind::Continuous},
                         {"amplitude", AttributeKind::Continuous},
                         {"shape_class", AttributeKind::Categorical}};
    schema.dependency = "cycle";
    Dataset out(schema);
    for (std::size_t c = 0; c < n_cycles; ++c) {
        const double* cycle = values.data() + c * period;
        double sum = 0.0;
        double mn = cycle[0];
        double mx = cycle[0];
        for (std::size_t i = 0; i < period; ++i) {
            sum += cycle[i];
            mn = std::min(mn, cycle[i]);
            mx = std::max(mx, cycle[i]);
        }
        out.append_row({static_cast<double>(c), sum / static_cast<double>(period),
                        mn, mx, mx - mn,
                        "shape_" + std::to_string(assignment[c])});
    }
    return out;
}

SymbolSequence SymbolSequence::from_tokens(std::vector<std::string> tokens) {
    SymbolSequence seq;
    seq.tokens = std::move(tokens);
    for (const auto& t : seq.tokens) {
        if (t.empty()) throw ValidationError("symbol sequence: empty token");
        seq.alphabet.insert(t);
    }
    return seq;
}

SymbolSequence SymbolSequence::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sequence file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return from_tokens(std::move(tokens));
}

Dataset windowize(const SymbolSequence& sequence, std::size_t width) {
    if (width < 2) throw ParamError("windowize: width must be >= 2");
    if (width > sequence.tokens.size()) {
        throw ParamError("windowize: width exceeds sequence length");
    }
    Schema schema;
    for (std::size_t i = 0; i < width; ++i) {
        schema.attributes.push_back(
            {"pos_" + std::to_string(i), AttributeKind::Categorical});
    }
    Dataset out(schema);
    std::vector<Value> row(width);
    for (std::size_t start = 0; start + width <= sequence.tokens.size(); ++start) {
        for (std::size_t i = 0; i < width; ++i) row[i] = sequence.tokens[start + i];
        out.append_row(row);
    }
    return out;
}

std::string_view to_string(AggregateFn fn) {
    switch (fn) {
        case AggregateFn::Mean: return "mean";
        case AggregateFn::Min: return "min";
        case AggregateFn::Max: return "max";
        case AggregateFn::Count: return "count";
        case AggregateFn::Mode: return "mode";
    }
    throw ParamError("invalid aggregate function");
}

AggregateFn aggregate_fn_from_string(std::string_view s) {
    if (s == "mean") return AggregateFn::Mean;
    if (s == "min") return AggregateFn::Min;
    if (s == "max") return AggregateFn::Max;
    if (s == "count") return AggregateFn::Count;
    if (s == "mode") return AggregateFn::Mode;
    throw ParamError("unknown aggregate function: '" + std::string(s) + "'");
}

Dataset aggregate_by(const Dataset& dataset, const std::string& group_key,
                     const std::vector<Aggregation>& aggregations) {
    const std::size_t key_attr = dataset.schema().index_of(group_key);
    const AttributeKind key_kind = dataset.schema().attributes[key_attr].kind;

    struct Plan {
        std::size_t attr;
        AggregateFn fn;
        AttributeKind out_kind;
        std::string out_name;
    };
    std::vector<Plan> plans;
    for (const auto& agg : aggregations) {
        const std::size_t attr = dataset.schema().index_of(agg.attribute);
        const AttributeKind kind = dataset.schema().attributes[attr].kind;
        AttributeKind out_kind = AttributeKind::Continuous;
        switch (agg.fn) {
            case AggregateFn::Mean:
            case AggregateFn::Min:
            case AggregateFn::Max:
                if (kind != AttributeKind::Continuous) {
                    throw ValidationError("aggregate: " +
                                          std::string(to_string(agg.fn)) +
                                          " needs a continuous attribute ('" +
                                          agg.attribute + "' is categorical)");
                }
                break;
            case AggregateFn::Count:
                break;
            case AggregateFn::Mode:
                out_kind = kind;
                break;
        }
        plans.push_back({attr, agg.fn, out_kind,
                         agg.attribute + "_" + std::string(to_string(agg.fn))});
    }

    // Group rows by key value, first-appearance order.
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::size_t>> groups;
    const auto key_of_row = [&](std::size_t row) {
        if (key_kind == AttributeKind::Continuous) {
            return format_double(dataset.continuous(key_attr)[row]);
        }
        return std::string(dataset.categorical(key_attr).label(row));
    };
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        const std::string key = key_of_row(row);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) group_order.push_back(key);
        it->second.push_back(row);
    }

    Schema schema;
    schema.attributes.push_back({group_key, key_kind});
    for (const auto& plan : plans) {
        schema.attributes.push_back({plan.out_name, plan.out_kind});
    }
    Dataset out(schema);

    for (const auto& key : group_order) {
        const auto& rows = groups[key];
        std::vector<Value> record;
        if (key_kind == AttributeKind::Continuous) {
            record.emplace_back(dataset.continuous(key_attr)[rows[0]]);
        } else {
            record.emplace_back(key);
        }
        for (const auto& plan : plans) {
            switch (plan.fn) {
                case AggregateFn::Mean: {
                    double sum = 0.0;
                    for (std::size_t r : rows) {
                        sum += dataset.continuous(plan.attr)[r];
                    }
                    record.emplace_back(sum / static_cast<double>(rows.size()));
                    break;
                }
                case AggregateFn::Min:
                case AggregateFn::Max: {
                    double best = dataset.continuous(plan.attr)[rows[0]];
                    for (std::size_t r : rows) {
                        const double v = dataset.continuous(plan.attr)[r];
                        best = plan.fn == AggregateFn::Min ? std::min(best, v)
                                                           : std::max(best, v);
                    }
                    record.emplace_back(best);
                    break;
                }
                case AggregateFn::Count: {
                    record.emplace_back(static_cast<double>(rows.size()));
                    break;
                }
                case AggregateFn::Mode: {
                    if (plan.out_kind == AttributeKind::Continuous) {
                        std::map<double, std::size_t> counts;
                        for (std::size_t r : rows) {
                            ++counts[dataset.continuous(plan.attr)[r]];
                        }
                        double best = rows.empty() ? 0.0 : counts.begin()->first;
                        std::size_t best_count = 0;
                        for (const auto& [v, c] : counts) {
                            if (c > best_count) {
                                best = v;
                                best_count = c;
                            }
                        }
                        record.emplace_back(best);
                    } else {
                        std::map<std::string, std::size_t> counts;
                        for (std::size_t r : rows) {
                            ++counts[std::string(
                                dataset.categorical(plan.attr).label(r))];
                        }
                        std::string best;
                        std::size_t best_count = 0;
                        for (const auto& [v, c] : counts) {
                            if (c > best_count) {
                                best = v;
                                best_count = c;
                            }
                        }
                        record.emplace_back(best);
                    }
                    break;
                }
            }
        }
        out.append_row(record);
    }
    return out;
}

}  // namespace anobench
