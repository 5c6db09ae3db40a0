#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dim3/state.hpp"

namespace dim3 {

// Known mixed-membership rows and role compatibility behind a synthetic
// dataset, kept for recovery evaluation.
struct GroundTruth {
    std::vector<std::vector<double>> membership;  // one row per node, sums to 1
    CompatibilityMatrix compat;
    int case_id = 0;

    void validate() const {
        for (const auto& row : membership) {
            double s = 0.0;
            for (double v : row) {
                if (v < 0.0) throw DataError("GroundTruth: negative membership");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-10) throw DataError("GroundTruth: row does not sum to 1");
        }
        for (double v : compat.w)
            if (v < 0.0 || v > 1.0) throw DataError("GroundTruth: compat entry outside [0,1]");
    }
};

struct DatasetBundle {
    RelationTensor data;
    std::optional<GroundTruth> truth;
    std::string name;
    std::vector<std::string> node_labels;
    std::vector<std::string> time_labels;

    void validate() const {
        if (truth) {
            truth->validate();
            if (static_cast<int>(truth->membership.size()) != data.nodes())
                throw DataError("DatasetBundle: truth/node dimension mismatch");
        }
        if (!node_labels.empty() && static_cast<int>(node_labels.size()) != data.nodes())
            throw DataError("DatasetBundle: node label count mismatch");
        if (!time_labels.empty() && static_cast<int>(time_labels.size()) != data.steps())
            throw DataError("DatasetBundle: time label count mismatch");
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Plain-text dataset format: a header (name, n, T), one row block per time
// step with '-' on the diagonal, optional node/time labels and optional
// ground truth. Written so that save -> load is bit-exact.
inline void save_dataset(const DatasetBundle& bundle, const std::string& path) {
    bundle.validate();
    std::ofstream out(path);
    if (!out) throw DataError("save_dataset: cannot open " + path);
    const auto& d = bundle.data;
    out << "dim3 dataset 1\n";
    out << "name " << (bundle.name.empty() ? std::string("unnamed") : bundle.name) << "\n";
    out << "n " << d.nodes() << "\n";
    out << "T " << d.steps() << "\n";
    if (!bundle.node_labels.empty()) {
        out << "nodes";
        for (const auto& s : bundle.node_labels) out << ' ' << s;
        out << "\n";
    }
    if (!bundle.time_labels.empty()) {
        out << "times";
        for (const auto& s : bundle.time_labels) out << ' ' << s;
        out << "\n";
    }
    for (int t = 0; t < d.steps(); ++t) {
        out << "block " << (t + 1) << "\n";
        for (int i = 0; i < d.nodes(); ++i) {
            for (int j = 0; j < d.nodes(); ++j) {
                if (j) out << ' ';
                if (i == j)
                    out << '-';
                else
                    out << static_cast<int>(d.at(t, i, j));
            }
            out << "\n";
        }
    }
    if (bundle.truth) {
        const auto& g = *bundle.truth;
        int k = g.compat.k;
        out << "truth " << k;
        if (g.case_id > 0) out << " case " << g.case_id;
        out << "\n";
        out << "membership\n";
        for (const auto& row : g.membership) {
            for (size_t c = 0; c < row.size(); ++c)
                out << (c ? " " : "") << detail::fmt_double(row[c]);
            out << "\n";
        }
        out << "compat\n";
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) out << (b ? " " : "") << detail::fmt_double(g.compat.at(a, b));
            out << "\n";
        }
    }
    out << "end\n";
    if (!out) throw DataError("save_dataset: write failure on " + path);
}

namespace detail {

struct LineReader {
    std::ifstream in;
    std::string path;
    int line_no = 0;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) throw DataError("load_dataset: cannot open " + p);
    }

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(path + ":" + std::to_string(line_no) + ": " + msg);
    }
};

}  // namespace detail

inline DatasetBundle load_dataset(const std::string& path) {
    detail::LineReader rd(path);
    std::string line;
    if (!rd.next(line) || line != "dim3 dataset 1") rd.fail("expected header 'dim3 dataset 1'");

    DatasetBundle bundle;
    int n = -1, T = -1;
    std::vector<std::string> pending;
    auto need = [&](bool ok, const char* msg) {
        if (!ok) rd.fail(msg);
    };

    while (rd.next(line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "name") {
            std::string rest;
            std::getline(ss, rest);
            bundle.name = rest.empty() ? "" : rest.substr(1);
        } else if (key == "n") {
            need(static_cast<bool>(ss >> n) && n >= 2, "invalid node count");
        } else if (key == "T") {
            need(static_cast<bool>(ss >> T) && T >= 0, "invalid time count");
        } else if (key == "nodes") {
            std::string tok;
            while (ss >> tok) bundle.node_labels.push_back(tok);
        } else if (key == "times") {
            std::string tok;
            while (ss >> tok) bundle.time_labels.push_back(tok);
        } else if (key == "block") {
            need(n > 0 && T > 0, "block before dimensions");
            int tb;
            need(static_cast<bool>(ss >> tb) && tb >= 1 && tb <= T, "block index out of range");
            if (bundle.data.nodes() == 0) bundle.data = RelationTensor(n, T);
            int t = tb - 1;
            for (int i = 0; i < n; ++i) {
                need(rd.next(line), "unexpected end of file inside block");
                std::istringstream rs(line);
                for (int j = 0; j < n; ++j) {
                    std::string tok;
                    need(static_cast<bool>(rs >> tok), "row too short");
                    if (i == j) {
                        if (tok != "-") rd.fail("diagonal entry must be '-'");
                    } else if (tok == "0" || tok == "1") {
                        bundle.data.set(t, i, j, tok == "1" ? 1 : 0);
                    } else {
                        rd.fail("edge value must be 0 or 1, got '" + tok + "'");
                    }
                }
                std::string extra;
                if (rs >> extra) rd.fail("row too long");
            }
        } else if (key == "truth") {
            need(n > 0, "truth before dimensions");
            GroundTruth g;
            int k;
            need(static_cast<bool>(ss >> k) && k >= 1, "invalid truth K");
            std::string tag;
            if (ss >> tag) {
                need(tag == "case", "unexpected token after truth K");
                need(static_cast<bool>(ss >> g.case_id), "invalid case id");
            }
            need(rd.next(line) && line == "membership", "expected 'membership'");
            g.membership.assign(n, std::vector<double>(k, 0.0));
            for (int i = 0; i < n; ++i) {
                need(rd.next(line), "unexpected end of file in membership");
                std::istringstream rs(line);
                for (int c = 0; c < k; ++c) need(static_cast<bool>(rs >> g.membership[i][c]),
                                                 "membership row too short");
            }
            need(rd.next(line) && line == "compat", "expected 'compat'");
            g.compat = CompatibilityMatrix(k);
            for (int a = 0; a < k; ++a) {
                need(rd.next(line), "unexpected end of file in compat");
                std::istringstream rs(line);
                for (int b = 0; b < k; ++b) {
                    double v;
                    need(static_cast<bool>(rs >> v), "compat row too short");
                    g.compat.at(a, b) = v;
                }
            }
            bundle.truth = std::move(g);
        } else if (key == "end") {
            if (bundle.data.nodes() == 0) {
                need(n > 0 && T == 0, "no data blocks");
                bundle.data = RelationTensor(n, 0);
            }
            bundle.validate();
            return bundle;
        } else {
            rd.fail("unknown directive '" + key + "'");
        }
    }
    rd.fail("missing 'end'");
}

}  // namespace dim3
