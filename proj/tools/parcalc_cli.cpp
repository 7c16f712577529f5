// command line front end: partition-tower tables, collapse/splitting checks,
// and diagram computations.  Output is table, csv, or json; identical inputs
// produce byte-identical output.  Exit 0 = success or passing verdict,
// 1 = failing verdict, 2 = usage error (one line on stderr).

#include "parcalc/diagrams.hpp"
#include "parcalc/ptower.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace {

using namespace parcalc;
using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// PARCALC_THREADS caps the worker count; unset means hardware width
int thread_limit() {
    int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    const char* env = std::getenv("PARCALC_THREADS");
    if (!env) return hw;
    std::string s(env);
    size_t pos = 0;
    int cap = 0;
    try {
        cap = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || cap < 1) throw UsageError("PARCALC_THREADS must be a positive integer");
    return std::min(hw, cap);
}

enum class Format { table, csv, json };

Format to_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    return Format::table;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& r : rows) {
        for (size_t j = 0; j < r.size(); ++j) {
            if (j) out += ',';
            out += csv_field(r[j]);
        }
        out += '\n';
    }
    return out;
}

// two-space aligned columns, no trailing padding
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> w;
    for (const auto& r : rows)
        for (size_t j = 0; j < r.size(); ++j) {
            if (w.size() <= j) w.resize(j + 1, 0);
            w[j] = std::max(w[j], r[j].size());
        }
    std::string out;
    for (const auto& r : rows) {
        for (size_t j = 0; j < r.size(); ++j) {
            if (j) out.append(w[j - 1] - r[j - 1].size() + 2, ' ');
            out += r[j];
        }
        out += '\n';
    }
    return out;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write output file '" + path + "'");
    f << text;
    f.flush();
    if (!f) throw UsageError("cannot write output file '" + path + "'");
}

ojson record(const std::string& sub, const ojson& input, ojson result) {
    ojson j;
    j["schema"] = "parcalc." + sub + "/1";
    j["subcommand"] = sub;
    j["input"] = input;
    j["result"] = std::move(result);
    return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

struct DegreeRank {
    int degree = 0;
    long long rank = 0;
};

std::vector<DegreeRank> nonzero_ranks(const GradedRanks& g) {
    std::vector<DegreeRank> v;
    for (int n = 0; n <= g.top(); ++n)
        if (g.at(n) != 0) v.push_back({n, g.at(n)});
    return v;
}

// negative holds degree -(i+1) at entry i
std::vector<DegreeRank> signed_ranks(const GradedRanks& nonneg, const GradedRanks& negative) {
    std::vector<DegreeRank> v;
    for (int i = negative.top(); i >= 0; --i)
        if (negative.at(i) != 0) v.push_back({-(i + 1), negative.at(i)});
    auto tail = nonzero_ranks(nonneg);
    v.insert(v.end(), tail.begin(), tail.end());
    return v;
}

ojson ranks_json(const std::vector<DegreeRank>& rows) {
    ojson a = ojson::array();
    for (const auto& r : rows) {
        ojson e;
        e["degree"] = r.degree;
        e["rank"] = r.rank;
        a.push_back(std::move(e));
    }
    return a;
}

SetPartition parse_blocks(const std::string& text) {
    try {
        return SetPartition::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError("cannot parse --blocks '" + text + "': " + e.what());
    }
}

// ---------------------------------------------------------------- tn

int cmd_tn(int n, Format fmt, const std::string& out) {
    if (n < 1 || n > 6) throw UsageError("--n must be in [1, 6]");
    GradedRanks g = t_homology(SetPartition::one_block(n));
    auto rows = nonzero_ranks(g);
    std::string text;
    if (fmt == Format::table) {
        text = "tn n=" + std::to_string(n) + "\n";
        std::vector<std::vector<std::string>> t{{"degree", "rank"}};
        for (const auto& r : rows) t.push_back({std::to_string(r.degree), std::to_string(r.rank)});
        text += render_table(t);
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> t{{"n", "degree", "rank"}};
        for (const auto& r : rows)
            t.push_back({std::to_string(n), std::to_string(r.degree), std::to_string(r.rank)});
        text = render_csv(t);
    } else {
        ojson in;
        in["n"] = n;
        ojson res;
        res["ranks"] = ranks_json(rows);
        res["total"] = g.total();
        ojson j = record("tn", in, std::move(res));
        j["exit"] = 0;
        text = dump(j);
    }
    write_output(text, out);
    return 0;
}

// ---------------------------------------------------------------- tlambda

int cmd_tlambda(const std::string& blocks, Format fmt, const std::string& out) {
    SetPartition p = parse_blocks(blocks);
    if (p.support_size() > 7) throw UsageError("--blocks support must be at most 7");
    GradedRanks g = t_homology(p);
    auto rows = nonzero_ranks(g);
    std::string text;
    if (fmt == Format::table) {
        text = "tlambda blocks=" + p.str() + " excess=" + std::to_string(p.excess()) + "\n";
        std::vector<std::vector<std::string>> t{{"degree", "rank"}};
        for (const auto& r : rows) t.push_back({std::to_string(r.degree), std::to_string(r.rank)});
        text += render_table(t);
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> t{{"partition", "excess", "degree", "rank"}};
        for (const auto& r : rows)
            t.push_back({p.str(), std::to_string(p.excess()), std::to_string(r.degree),
                         std::to_string(r.rank)});
        text = render_csv(t);
    } else {
        ojson in;
        in["blocks"] = p.str();
        ojson res;
        res["excess"] = p.excess();
        res["ranks"] = ranks_json(rows);
        res["total"] = g.total();
        ojson j = record("tlambda", in, std::move(res));
        j["exit"] = 0;
        text = dump(j);
    }
    write_output(text, out);
    return 0;
}

// ---------------------------------------------------------------- layers

void check_kd(int k, int d) {
    if (k < 1 || k > 10) throw UsageError("--k must be in [1, 10]");
    if (d < 2 || d > 16) throw UsageError("--dim must be in [2, 16]");
}

int cmd_layers(int k, int d, int excess, bool have_excess, Format fmt, const std::string& out) {
    check_kd(k, d);
    if (have_excess && excess < 0) throw UsageError("--excess must be non-negative");
    LayerTable t = layer_table(k, d, thread_limit());
    std::vector<LayerRow> rows;
    for (const auto& r : t.rows)
        if (!have_excess || r.i == excess) rows.push_back(r);
    long long total = 0;
    for (const auto& r : rows) total += r.rank;
    std::string text;
    if (fmt == Format::table) {
        text = "layers k=" + std::to_string(k) + " d=" + std::to_string(d);
        if (have_excess) text += " excess=" + std::to_string(excess);
        text += "\n";
        std::vector<std::vector<std::string>> tt{{"i", "degree", "rank"}};
        for (const auto& r : rows)
            tt.push_back({std::to_string(r.i), std::to_string(r.degree), std::to_string(r.rank)});
        text += render_table(tt);
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> tt{{"k", "d", "i", "degree", "rank"}};
        for (const auto& r : rows)
            tt.push_back({std::to_string(k), std::to_string(d), std::to_string(r.i),
                          std::to_string(r.degree), std::to_string(r.rank)});
        text = render_csv(tt);
    } else {
        ojson in;
        in["k"] = k;
        in["d"] = d;
        if (have_excess) in["excess"] = excess;
        ojson res;
        ojson arr = ojson::array();
        for (const auto& r : rows) {
            ojson e;
            e["i"] = r.i;
            e["degree"] = r.degree;
            e["rank"] = r.rank;
            arr.push_back(std::move(e));
        }
        res["rows"] = std::move(arr);
        res["total"] = total;
        ojson j = record("layers", in, std::move(res));
        j["exit"] = 0;
        text = dump(j);
    }
    write_output(text, out);
    return 0;
}

// ---------------------------------------------------------------- collapse

int cmd_collapse(int k, int d, Format fmt, const std::string& out) {
    check_kd(k, d);
    LayerTable t = layer_table(k, d, thread_limit());
    PoincareOracle o = poincare_oracle(k, d);
    CollapseReport rep = compare_with_oracle(t, o);

    std::map<int, long long> by_degree;
    for (const auto& r : t.rows) by_degree[r.degree] += r.rank;
    std::set<int> degrees;
    for (const auto& [deg, rk] : by_degree) degrees.insert(deg);
    for (size_t i = 0; i < o.coeffs.size(); ++i)
        if (o.coeffs[i] != 0) degrees.insert(static_cast<int>(i));
    auto oracle_at = [&](int deg) -> long long {
        return (deg >= 0 && deg < static_cast<int>(o.coeffs.size())) ? o.coeffs[deg] : 0;
    };
    auto table_at = [&](int deg) -> long long {
        auto it = by_degree.find(deg);
        return it == by_degree.end() ? 0 : it->second;
    };

    std::string text;
    if (fmt == Format::table) {
        text = "collapse k=" + std::to_string(k) + " d=" + std::to_string(d) + "\n";
        std::vector<std::vector<std::string>> tt{{"degree", "table", "oracle", "match"}};
        for (int deg : degrees)
            tt.push_back({std::to_string(deg), std::to_string(table_at(deg)),
                          std::to_string(oracle_at(deg)),
                          table_at(deg) == oracle_at(deg) ? "1" : "0"});
        text += render_table(tt);
        text += std::string("verdict ") + (rep.ok ? "pass" : "fail") + "\n";
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> tt{
            {"k", "d", "degree", "table_rank", "oracle_rank", "match"}};
        for (int deg : degrees)
            tt.push_back({std::to_string(k), std::to_string(d), std::to_string(deg),
                          std::to_string(table_at(deg)), std::to_string(oracle_at(deg)),
                          table_at(deg) == oracle_at(deg) ? "1" : "0"});
        text = render_csv(tt);
    } else {
        ojson in;
        in["k"] = k;
        in["d"] = d;
        ojson res;
        ojson tbl = ojson::array();
        for (const auto& r : t.rows) {
            ojson e;
            e["i"] = r.i;
            e["degree"] = r.degree;
            e["rank"] = r.rank;
            tbl.push_back(std::move(e));
        }
        res["table"] = std::move(tbl);
        ojson orc = ojson::array();
        for (size_t i = 0; i < o.coeffs.size(); ++i)
            if (o.coeffs[i] != 0) {
                ojson e;
                e["degree"] = static_cast<int>(i);
                e["rank"] = o.coeffs[i];
                orc.push_back(std::move(e));
            }
        res["oracle"] = std::move(orc);
        ojson df = ojson::array();
        for (const auto& r : rep.diff) {
            ojson e;
            e["degree"] = r.degree;
            e["table_rank"] = r.table_rank;
            e["oracle_rank"] = r.oracle_rank;
            df.push_back(std::move(e));
        }
        res["diff"] = std::move(df);
        ojson j = record("collapse", in, std::move(res));
        j["verdict"] = rep.ok ? "pass" : "fail";
        j["exit"] = rep.ok ? 0 : 1;
        text = dump(j);
    }
    write_output(text, out);
    return rep.ok ? 0 : 1;
}

// ---------------------------------------------------------------- ek

std::string map_text(const std::vector<int>& m) {
    std::string s;
    for (size_t i = 0; i < m.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(m[i] + 1);
    }
    return s;
}

int cmd_ek(int k, Format fmt, const std::string& out) {
    if (k < 1 || k > 3) throw UsageError("--k must be in [1, 3] for ek");
    EkCategory cat = build_ek(k);
    std::string text;
    if (fmt == Format::table) {
        text = "ek k=" + std::to_string(k) + " objects=" + std::to_string(cat.objects.size()) +
               " morphisms=" + std::to_string(cat.morphisms.size()) + "\n\n";
        std::vector<std::vector<std::string>> ot{{"object", "partition", "support", "blocks"}};
        for (size_t i = 0; i < cat.objects.size(); ++i)
            ot.push_back({std::to_string(i), cat.objects[i].str(),
                          std::to_string(cat.objects[i].support_size()),
                          std::to_string(cat.objects[i].block_count())});
        text += render_table(ot);
        text += "\n";
        std::vector<std::vector<std::string>> mt{{"src", "dst", "map"}};
        for (const auto& m : cat.morphisms)
            mt.push_back({std::to_string(m.src), std::to_string(m.dst), map_text(m.map)});
        text += render_table(mt);
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> tt{{"k", "object", "partition", "support", "blocks"}};
        for (size_t i = 0; i < cat.objects.size(); ++i)
            tt.push_back({std::to_string(k), std::to_string(i), cat.objects[i].str(),
                          std::to_string(cat.objects[i].support_size()),
                          std::to_string(cat.objects[i].block_count())});
        text = render_csv(tt);
    } else {
        ojson in;
        in["k"] = k;
        ojson res;
        res["object_count"] = cat.objects.size();
        ojson objs = ojson::array();
        for (size_t i = 0; i < cat.objects.size(); ++i) {
            ojson e;
            e["index"] = i;
            e["partition"] = cat.objects[i].str();
            e["support"] = cat.objects[i].support_size();
            e["blocks"] = cat.objects[i].block_count();
            objs.push_back(std::move(e));
        }
        res["objects"] = std::move(objs);
        res["morphism_count"] = cat.morphisms.size();
        ojson mors = ojson::array();
        for (const auto& m : cat.morphisms) {
            ojson e;
            e["src"] = m.src;
            e["dst"] = m.dst;
            ojson mm = ojson::array();
            for (int v : m.map) mm.push_back(v + 1);
            e["map"] = std::move(mm);
            mors.push_back(std::move(e));
        }
        res["morphisms"] = std::move(mors);
        ojson j = record("ek", in, std::move(res));
        j["exit"] = 0;
        text = dump(j);
    }
    write_output(text, out);
    return 0;
}

// ---------------------------------------------------------------- goodmap

bool label_ok(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

// "1:a,2:b,...": every support element exactly once; labels alphanumeric
std::vector<int> parse_map_text(const std::string& text, int support,
                                std::vector<std::string>& labels, std::string& echo) {
    std::vector<int> f(support, -1);
    std::vector<std::string> by_element(support);
    std::map<std::string, int> label_index;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
        size_t colon = tok.find(':');
        if (colon == std::string::npos || colon == 0)
            throw UsageError("cannot parse --map entry '" + tok + "'");
        std::string lhs = tok.substr(0, colon);
        std::string label = tok.substr(colon + 1);
        size_t used = 0;
        int e = 0;
        try {
            e = std::stoi(lhs, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != lhs.size() || e < 1 || e > support)
            throw UsageError("--map element '" + lhs + "' is outside the support");
        if (!label_ok(label)) throw UsageError("--map label '" + label + "' is not alphanumeric");
        if (f[e - 1] != -1) throw UsageError("--map assigns element " + lhs + " twice");
        auto [it, fresh] = label_index.try_emplace(label, static_cast<int>(label_index.size()));
        f[e - 1] = it->second;
        by_element[e - 1] = label;
        if (fresh) labels.push_back(label);
    }
    for (int s = 0; s < support; ++s)
        if (f[s] == -1)
            throw UsageError("--map does not cover element " + std::to_string(s + 1));
    echo.clear();
    for (int s = 0; s < support; ++s) {
        if (s) echo += ',';
        echo += std::to_string(s + 1) + ":" + by_element[s];
    }
    return f;
}

// image partition written with the user's labels
std::string image_with_labels(const SetPartition& img, const std::vector<int>& f,
                              const std::vector<std::string>& labels) {
    std::vector<int> sorted_vals(f);
    std::sort(sorted_vals.begin(), sorted_vals.end());
    sorted_vals.erase(std::unique(sorted_vals.begin(), sorted_vals.end()), sorted_vals.end());
    std::string s;
    for (size_t b = 0; b < img.blocks().size(); ++b) {
        if (b) s += '|';
        const auto& blk = img.blocks()[b];
        for (size_t t = 0; t < blk.size(); ++t) {
            if (t) s += ',';
            s += labels[sorted_vals[blk[t]]];
        }
    }
    return s;
}

int cmd_goodmap(const std::string& blocks, const std::string& map_arg, Format fmt,
                const std::string& out) {
    SetPartition p = parse_blocks(blocks);
    if (p.support_size() > 10) throw UsageError("--blocks support must be at most 10");
    std::vector<std::string> labels;
    std::string echo;
    std::vector<int> f = parse_map_text(map_arg, p.support_size(), labels, echo);
    MapClass cls = classify_map(p, f);
    SetPartition img = image_partition(p, f);
    std::string verdict = cls == MapClass::good ? "good" : "bad";
    std::string text;
    if (fmt == Format::table) {
        text = "goodmap blocks=" + p.str() + " map=" + echo + "\n";
        text += "class " + verdict + "\n";
    } else if (fmt == Format::csv) {
        text = render_csv({{"blocks", "map", "class"}, {p.str(), echo, verdict}});
    } else {
        ojson in;
        in["blocks"] = p.str();
        in["map"] = echo;
        ojson res;
        res["class"] = verdict;
        res["image"] = image_with_labels(img, f, labels);
        res["source_excess"] = p.excess();
        res["image_excess"] = img.excess();
        ojson j = record("goodmap", in, std::move(res));
        j["exit"] = 0;
        text = dump(j);
    }
    write_output(text, out);
    return 0;
}

// ---------------------------------------------------------------- spec files

ojson load_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read spec file '" + path + "'");
    try {
        return ojson::parse(f);
    } catch (const std::exception& e) {
        throw UsageError("spec file '" + path + "': " + e.what());
    }
}

void check_keys(const ojson& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw UsageError(where + ": unknown key '" + key + "'");
}

Rational rational_from_json(const ojson& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::exception&) {
            throw UsageError(where + ": cannot parse rational '" + j.get<std::string>() + "'");
        }
    }
    throw UsageError(where + ": matrix entries must be integers or rational strings");
}

// dense rows; shape is fixed by the surrounding complex dims
RatMatrix matrix_from_json(const ojson& j, int nrows, int ncols, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != nrows)
        throw UsageError(where + ": expected " + std::to_string(nrows) + " rows");
    if (nrows == 0) return RatMatrix::zero(0, ncols);
    std::vector<std::vector<Rational>> rows(nrows);
    for (int i = 0; i < nrows; ++i) {
        const ojson& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != ncols)
            throw UsageError(where + ": row " + std::to_string(i) + " must have " +
                             std::to_string(ncols) + " entries");
        for (int c = 0; c < ncols; ++c)
            rows[i].push_back(rational_from_json(row[c], where));
    }
    return RatMatrix::from_rows(rows);
}

ChainComplex complex_from_json(const ojson& j, const std::string& where) {
    check_keys(j, {"dims", "diffs"}, where);
    if (!j.contains("dims") || !j["dims"].is_array())
        throw UsageError(where + ": 'dims' must be an array");
    std::vector<int> dims;
    for (const auto& v : j["dims"]) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw UsageError(where + ": dims must be non-negative integers");
        dims.push_back(v.get<int>());
    }
    size_t want = dims.empty() ? 0 : dims.size() - 1;
    std::vector<RatMatrix> diffs;
    if (j.contains("diffs")) {
        if (!j["diffs"].is_array() || j["diffs"].size() != want)
            throw UsageError(where + ": 'diffs' must list " + std::to_string(want) + " matrices");
        for (size_t i = 0; i < want; ++i)
            diffs.push_back(matrix_from_json(j["diffs"][i], dims[i], dims[i + 1],
                                             where + " diffs[" + std::to_string(i) + "]"));
    } else {
        for (size_t i = 0; i < want; ++i) diffs.push_back(RatMatrix::zero(dims[i], dims[i + 1]));
    }
    try {
        return ChainComplex(std::move(dims), std::move(diffs));
    } catch (const std::invalid_argument& e) {
        throw UsageError(where + ": " + e.what());
    }
}

// blocks[n]: src_n -> dst_n; missing trailing blocks are zero-filled
ChainMap chainmap_from_json(const ojson& j, const ChainComplex& src, const ChainComplex& dst,
                            const std::string& where) {
    int need = std::max({src.top_degree(), dst.top_degree(), -1}) + 1;
    if (!j.is_array() || static_cast<int>(j.size()) > need)
        throw UsageError(where + ": expected at most " + std::to_string(need) + " blocks");
    ChainMap m;
    for (int n = 0; n < need; ++n) {
        if (n < static_cast<int>(j.size()))
            m.blocks.push_back(matrix_from_json(j[n], dst.dim(n), src.dim(n),
                                                where + " block " + std::to_string(n)));
        else
            m.blocks.push_back(RatMatrix::zero(dst.dim(n), src.dim(n)));
    }
    return m;
}

struct ParsedDiagram {
    std::vector<std::string> names;
    ChainDiagram diagram;
};

// {"objects": [names], "arrows": [{"src","dst"}], "variance": "co"|"contra",
//  "complexes": {name: complex}, "maps": {"a>b": blocks}}.  The shape is the
// thin closure of the listed arrows; maps for composite arrows may be omitted
// and are then derived by composition.
ParsedDiagram parse_diagram(const ojson& j, const std::string& where) {
    check_keys(j, {"objects", "arrows", "variance", "complexes", "maps"}, where);
    if (!j.contains("objects") || !j["objects"].is_array())
        throw UsageError(where + ": 'objects' must be an array of names");
    ParsedDiagram pd;
    std::map<std::string, int> index;
    for (const auto& v : j["objects"]) {
        if (!v.is_string() || !label_ok(v.get<std::string>()))
            throw UsageError(where + ": object names must be alphanumeric strings");
        std::string name = v.get<std::string>();
        if (index.count(name)) throw UsageError(where + ": duplicate object '" + name + "'");
        index[name] = static_cast<int>(pd.names.size());
        pd.names.push_back(name);
    }
    int nobj = static_cast<int>(pd.names.size());

    auto object_of = [&](const ojson& v, const std::string& ctx) {
        if (!v.is_string() || !index.count(v.get<std::string>()))
            throw UsageError(where + ": " + ctx + " names an unknown object");
        return index[v.get<std::string>()];
    };

    std::vector<std::pair<int, int>> rel;
    if (j.contains("arrows")) {
        if (!j["arrows"].is_array()) throw UsageError(where + ": 'arrows' must be an array");
        for (const auto& a : j["arrows"]) {
            check_keys(a, {"src", "dst"}, where + " arrows");
            if (!a.contains("src") || !a.contains("dst"))
                throw UsageError(where + ": arrows need 'src' and 'dst'");
            int s = object_of(a["src"], "arrow src");
            int t = object_of(a["dst"], "arrow dst");
            if (s == t) throw UsageError(where + ": identity arrows are implicit");
            rel.emplace_back(s, t);
        }
    }
    FiniteCategory cat;
    try {
        cat = FiniteCategory::thin(nobj, rel);
    } catch (const std::invalid_argument& e) {
        throw UsageError(where + ": " + e.what());
    }

    if (!j.contains("variance") || !j["variance"].is_string())
        throw UsageError(where + ": 'variance' must be \"co\" or \"contra\"");
    std::string var = j["variance"].get<std::string>();
    if (var != "co" && var != "contra")
        throw UsageError(where + ": 'variance' must be \"co\" or \"contra\"");
    Variance variance = var == "co" ? Variance::covariant : Variance::contravariant;

    if (!j.contains("complexes"))
        throw UsageError(where + ": 'complexes' must map every object to a complex");
    const ojson& cx = j["complexes"];
    if (!cx.is_object()) throw UsageError(where + ": 'complexes' must be an object");
    for (const auto& [key, value] : cx.items())
        if (!index.count(key)) throw UsageError(where + ": complexes: unknown object '" + key + "'");
    std::vector<ChainComplex> values(nobj);
    for (int x = 0; x < nobj; ++x) {
        if (!cx.contains(pd.names[x]))
            throw UsageError(where + ": complexes: missing object '" + pd.names[x] + "'");
        values[x] = complex_from_json(cx[pd.names[x]], where + " complexes['" + pd.names[x] + "']");
    }

    std::vector<ChainMap> actions(cat.arrow_count());
    std::vector<char> done(cat.arrow_count(), 0);
    std::map<std::pair<int, int>, int> arrow_of;
    for (int a = 0; a < cat.arrow_count(); ++a) {
        if (cat.is_identity(a)) {
            actions[a] = identity_map(values[cat.arrow(a).src]);
            done[a] = 1;
        } else {
            arrow_of[{cat.arrow(a).src, cat.arrow(a).dst}] = a;
        }
    }
    auto ends = [&](int a) {
        int x = cat.arrow(a).src, y = cat.arrow(a).dst;
        return variance == Variance::covariant ? std::pair{x, y} : std::pair{y, x};
    };
    if (j.contains("maps")) {
        const ojson& mp = j["maps"];
        if (!mp.is_object()) throw UsageError(where + ": 'maps' must be an object");
        for (const auto& [key, value] : mp.items()) {
            size_t gt = key.find('>');
            if (gt == std::string::npos || !index.count(key.substr(0, gt)) ||
                !index.count(key.substr(gt + 1)))
                throw UsageError(where + ": maps: bad arrow key '" + key + "'");
            auto it = arrow_of.find({index[key.substr(0, gt)], index[key.substr(gt + 1)]});
            if (it == arrow_of.end())
                throw UsageError(where + ": maps: no arrow '" + key + "'");
            auto [sx, dx] = ends(it->second);
            actions[it->second] =
                chainmap_from_json(value, values[sx], values[dx], where + " maps['" + key + "']");
            done[it->second] = 1;
        }
    }
    // composites not listed explicitly factor through a midpoint
    bool progress = true;
    while (progress) {
        progress = false;
        for (int a = 0; a < cat.arrow_count(); ++a) {
            if (done[a]) continue;
            int x = cat.arrow(a).src, y = cat.arrow(a).dst;
            for (int z = 0; z < nobj && !done[a]; ++z) {
                if (z == x || z == y) continue;
                auto f = arrow_of.find({x, z});
                auto g = arrow_of.find({z, y});
                if (f == arrow_of.end() || g == arrow_of.end()) continue;
                if (!done[f->second] || !done[g->second]) continue;
                actions[a] = variance == Variance::covariant
                                 ? compose(actions[g->second], actions[f->second])
                                 : compose(actions[f->second], actions[g->second]);
                done[a] = 1;
                progress = true;
            }
        }
    }
    for (int a = 0; a < cat.arrow_count(); ++a)
        if (!done[a])
            throw UsageError(where + ": missing map for arrow '" + pd.names[cat.arrow(a).src] +
                             ">" + pd.names[cat.arrow(a).dst] + "'");

    pd.diagram = ChainDiagram{std::move(cat), variance, std::move(values), std::move(actions)};
    return pd;
}

// ---------------------------------------------------------------- holim

int cmd_holim(const std::string& spec, Format fmt, const std::string& out) {
    ojson j = load_json(spec);
    ParsedDiagram pd = parse_diagram(j, "spec");
    std::string why;
    if (!is_valid_diagram(pd.diagram, &why)) throw UsageError("spec file: " + why);
    HolimResult h = holim(pd.diagram);
    auto rows = signed_ranks(h.betti, h.negative);
    std::string text;
    if (fmt == Format::table) {
        text = "holim spec=" + spec + "\n";
        std::vector<std::vector<std::string>> t{{"degree", "rank"}};
        for (const auto& r : rows) t.push_back({std::to_string(r.degree), std::to_string(r.rank)});
        text += render_table(t);
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> t{{"degree", "rank"}};
        for (const auto& r : rows)
            t.push_back({std::to_string(r.degree), std::to_string(r.rank)});
        text = render_csv(t);
    } else {
        ojson in;
        in["spec"] = spec;
        ojson res;
        res["ranks"] = ranks_json(rows);
        res["total"] = h.betti.total() + h.negative.total();
        ojson rec = record("holim", in, std::move(res));
        rec["exit"] = 0;
        text = dump(rec);
    }
    write_output(text, out);
    return 0;
}

// ---------------------------------------------------------------- split-check

// {"diagram": diagram-spec, "summands": [{"complexes","maps"}...],
//  "witness": {name: blocks}}.  Summands inherit the diagram's shape; witness
// columns run through the summand bases in listed order.
int cmd_split_check(const std::string& spec, Format fmt, const std::string& out) {
    ojson j = load_json(spec);
    check_keys(j, {"diagram", "summands", "witness"}, "spec");
    if (!j.contains("diagram")) throw UsageError("spec: missing 'diagram'");
    ParsedDiagram pd = parse_diagram(j["diagram"], "diagram");

    if (!j.contains("summands") || !j["summands"].is_array() || j["summands"].empty())
        throw UsageError("spec: 'summands' must be a non-empty array");
    const ojson& dg = j["diagram"];
    SplittingData data;
    for (size_t i = 0; i < j["summands"].size(); ++i) {
        const ojson& s = j["summands"][i];
        std::string where = "summands[" + std::to_string(i) + "]";
        check_keys(s, {"objects", "arrows", "variance", "complexes", "maps"}, where);
        for (const char* shared : {"objects", "arrows", "variance"})
            if (s.contains(shared) && (!dg.contains(shared) || s.at(shared) != dg.at(shared)))
                throw UsageError(where + ": '" + shared + "' must match the diagram verbatim");
        ojson full;
        for (const char* shared : {"objects", "arrows", "variance"})
            if (dg.contains(shared)) full[shared] = dg.at(shared);
        if (s.contains("complexes")) full["complexes"] = s.at("complexes");
        if (s.contains("maps")) full["maps"] = s.at("maps");
        data.summands.push_back(parse_diagram(full, where).diagram);
    }

    ChainDiagram sum = data.summands[0];
    for (size_t i = 1; i < data.summands.size(); ++i)
        sum = diagram_direct_sum(sum, data.summands[i]);

    if (!j.contains("witness") || !j["witness"].is_object())
        throw UsageError("spec: 'witness' must map every object to blocks");
    for (const auto& [key, value] : j["witness"].items())
        if (std::find(pd.names.begin(), pd.names.end(), key) == pd.names.end())
            throw UsageError("spec: witness: unknown object '" + key + "'");
    for (size_t x = 0; x < pd.names.size(); ++x) {
        if (!j["witness"].contains(pd.names[x]))
            throw UsageError("spec: witness: missing object '" + pd.names[x] + "'");
        data.witness.parts.push_back(chainmap_from_json(j["witness"][pd.names[x]], sum.values[x],
                                                        pd.diagram.values[x],
                                                        "witness['" + pd.names[x] + "']"));
    }

    SplitReport rep = holim_splitting_check(pd.diagram, data);
    auto lhs_rows = signed_ranks(rep.lhs, rep.lhs_negative);
    auto rhs_rows = signed_ranks(rep.rhs, rep.rhs_negative);
    std::set<int> degrees;
    for (const auto& r : lhs_rows) degrees.insert(r.degree);
    for (const auto& r : rhs_rows) degrees.insert(r.degree);
    auto rank_at = [](const std::vector<DegreeRank>& rows, int deg) -> long long {
        for (const auto& r : rows)
            if (r.degree == deg) return r.rank;
        return 0;
    };

    std::string text;
    if (fmt == Format::table) {
        text = "split-check spec=" + spec + "\n";
        std::vector<std::vector<std::string>> t{{"degree", "lhs", "rhs"}};
        for (int deg : degrees)
            t.push_back({std::to_string(deg), std::to_string(rank_at(lhs_rows, deg)),
                         std::to_string(rank_at(rhs_rows, deg))});
        text += render_table(t);
        for (const auto& p : rep.problems) text += "problem " + p + "\n";
        text += std::string("verdict ") + (rep.ok ? "pass" : "fail") + "\n";
    } else if (fmt == Format::csv) {
        std::vector<std::vector<std::string>> t{{"degree", "lhs_rank", "rhs_rank"}};
        for (int deg : degrees)
            t.push_back({std::to_string(deg), std::to_string(rank_at(lhs_rows, deg)),
                         std::to_string(rank_at(rhs_rows, deg))});
        text = render_csv(t);
    } else {
        ojson in;
        in["spec"] = spec;
        ojson res;
        res["problems"] = rep.problems;
        res["lhs"] = ranks_json(lhs_rows);
        res["rhs"] = ranks_json(rhs_rows);
        ojson df = ojson::array();
        for (const auto& r : rep.diff) {
            ojson e;
            e["degree"] = r.degree;
            e["lhs"] = r.lhs;
            e["rhs"] = r.rhs;
            df.push_back(std::move(e));
        }
        res["diff"] = std::move(df);
        ojson rec = record("split-check", in, std::move(res));
        rec["verdict"] = rep.ok ? "pass" : "fail";
        rec["exit"] = rep.ok ? 0 : 1;
        text = dump(rec);
    }
    write_output(text, out);
    return rep.ok ? 0 : 1;
}

// ---------------------------------------------------------------- driver

int dispatch(int argc, char** argv) {
    CLI::App app{"exact partition-tower and chain-diagram calculator"};
    app.require_subcommand(1);

    std::string fmt = "table";
    std::string out;
    auto add_io = [&](CLI::App* s) {
        s->add_option("--format", fmt, "output format")
            ->check(CLI::IsMember({"table", "csv", "json"}));
        s->add_option("--out", out, "output file (default stdout)");
    };

    int n = 0, k = 0, d = 0, excess = 0;
    std::string blocks, map_arg, spec;
    int code = 0;

    CLI::App* tn = app.add_subcommand("tn", "homology of the one-block partition pair");
    tn->add_option("--n", n, "support size")->required();
    add_io(tn);
    tn->callback([&] { code = cmd_tn(n, to_format(fmt), out); });

    CLI::App* tl = app.add_subcommand("tlambda", "homology of a partition pair");
    tl->add_option("--blocks", blocks, "partition, e.g. \"1,2|3,4\"")->required();
    add_io(tl);
    tl->callback([&] { code = cmd_tlambda(blocks, to_format(fmt), out); });

    CLI::App* ly = app.add_subcommand("layers", "tower layer ranks by excess");
    ly->add_option("--k", k, "number of points")->required();
    ly->add_option("--dim", d, "ambient dimension")->required();
    CLI::Option* exopt = ly->add_option("--excess", excess, "restrict to one layer");
    add_io(ly);
    ly->callback([&] { code = cmd_layers(k, d, excess, exopt->count() > 0, to_format(fmt), out); });

    CLI::App* co = app.add_subcommand("collapse", "layer table against the Poincare oracle");
    co->add_option("--k", k, "number of points")->required();
    co->add_option("--dim", d, "ambient dimension")->required();
    add_io(co);
    co->callback([&] { code = cmd_collapse(k, d, to_format(fmt), out); });

    CLI::App* ek = app.add_subcommand("ek", "category of irreducible fixed-excess partitions");
    ek->add_option("--k", k, "excess")->required();
    add_io(ek);
    ek->callback([&] { code = cmd_ek(k, to_format(fmt), out); });

    CLI::App* gm = app.add_subcommand("goodmap", "classify a surjection between partitions");
    gm->add_option("--blocks", blocks, "source partition")->required();
    gm->add_option("--map", map_arg, "images, e.g. \"1:a,2:b,3:b,4:c\"")->required();
    add_io(gm);
    gm->callback([&] { code = cmd_goodmap(blocks, map_arg, to_format(fmt), out); });

    CLI::App* hl = app.add_subcommand("holim", "homotopy limit of a diagram spec");
    hl->add_option("--spec", spec, "diagram spec file (json)")->required();
    add_io(hl);
    hl->callback([&] { code = cmd_holim(spec, to_format(fmt), out); });

    CLI::App* sc = app.add_subcommand("split-check", "verify a splitting and compare holims");
    sc->add_option("--spec", spec, "splitting spec file (json)")->required();
    add_io(sc);
    sc->callback([&] { code = cmd_split_check(spec, to_format(fmt), out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // help request
        std::cerr << "parcalc: " << e.what() << "\n";
        return 2;
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "parcalc: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "parcalc: " << e.what() << "\n";
        return 2;
    }
}
