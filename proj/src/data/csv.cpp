#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "arn/data/dataset.hpp"

namespace arn::data {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& s, int row, int col) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (!end || end == s.c_str() || *end != '\0')
        throw DataError("non-numeric cell `" + s + "` at row " + std::to_string(row) + ", column " +
                        std::to_string(col));
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open `" + path + "`");

    std::string line;
    if (!std::getline(in, line)) throw DataError("`" + path + "`: empty file");
    if (!line.empty() && line.front() == '#') {
        // optional format-version line before the header
        if (!std::getline(in, line)) throw DataError("`" + path + "`: missing header");
    }
    auto header = split_fields(line);
    if (header.size() < 3 || header[0] != "series_id" || header[1] != "t")
        throw DataError("`" + path + "`: header must start with series_id,t");

    Dataset d;
    size_t col = 2;
    while (col < header.size() && header[col] == "x" + std::to_string(col - 2)) ++col;
    d.n_in = static_cast<int>(col - 2);
    if (d.n_in < 1) throw DataError("`" + path + "`: no feature columns x0..");
    if (col < header.size() && header[col] == "label") {
        d.task = Task::Classification;
        if (col + 1 != header.size()) throw DataError("`" + path + "`: columns after label");
    } else {
        d.task = Task::Regression;
        size_t y0 = col;
        while (col < header.size() && header[col] == "y" + std::to_string(col - y0)) ++col;
        d.n_out = static_cast<int>(col - y0);
        if (d.n_out < 1 || col != header.size())
            throw DataError("`" + path + "`: expected y0..y{m-1} or label after features");
    }
    size_t ncols = header.size();

    struct Row {
        long t;
        std::vector<double> vals;
    };
    std::map<long, std::vector<Row>> rows;
    int rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != ncols)
            throw DataError("`" + path + "`: row " + std::to_string(rowno) + " has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(ncols));
        long id = std::lround(parse_cell(fields[0], rowno, 0));
        long t = std::lround(parse_cell(fields[1], rowno, 1));
        Row r;
        r.t = t;
        for (size_t c = 2; c < ncols; ++c)
            r.vals.push_back(parse_cell(fields[c], rowno, static_cast<int>(c)));
        rows[id].push_back(std::move(r));
    }
    if (rows.empty()) throw DataError("`" + path + "`: no data rows");

    int n_t = -1;
    int max_label = -1;
    for (auto& [id, rs] : rows) {
        std::sort(rs.begin(), rs.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
        if (n_t < 0) n_t = static_cast<int>(rs.size());
        if (static_cast<int>(rs.size()) != n_t)
            throw DataError("`" + path + "`: series " + std::to_string(id) + " has " +
                            std::to_string(rs.size()) + " timesteps, expected " +
                            std::to_string(n_t));
        Series s;
        s.id = id;
        for (const auto& r : rs) {
            for (int i = 0; i < d.n_in; ++i) s.inputs.push_back(r.vals[i]);
            if (d.task == Task::Regression)
                for (int i = 0; i < d.n_out; ++i) s.targets.push_back(r.vals[d.n_in + i]);
        }
        if (d.task == Task::Classification) {
            double lab = rs.front().vals[d.n_in];
            for (const auto& r : rs)
                if (r.vals[d.n_in] != lab)
                    throw DataError("`" + path + "`: series " + std::to_string(id) +
                                    " has inconsistent labels");
            s.label = static_cast<int>(std::lround(lab));
            if (s.label < 0)
                throw DataError("`" + path + "`: negative label in series " + std::to_string(id));
            max_label = std::max(max_label, s.label);
        }
        d.series.push_back(std::move(s));
    }
    d.n_t = n_t;
    if (d.task == Task::Classification) d.n_out = max_label + 1;
    return d;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write `" + path + "`");
    out << "# arn-dataset 1\n";
    out << "series_id,t";
    for (int i = 0; i < d.n_in; ++i) out << ",x" << i;
    if (d.task == Task::Classification) {
        out << ",label";
    } else {
        for (int i = 0; i < d.n_out; ++i) out << ",y" << i;
    }
    out << '\n';
    out.precision(17);
    for (size_t si = 0; si < d.series.size(); ++si) {
        const Series& s = d.series[si];
        for (int t = 0; t < d.n_t; ++t) {
            out << si << ',' << t;
            for (int i = 0; i < d.n_in; ++i) out << ',' << s.inputs[t * d.n_in + i];
            if (d.task == Task::Classification) {
                out << ',' << s.label;
            } else {
                for (int i = 0; i < d.n_out; ++i) out << ',' << s.targets[t * d.n_out + i];
            }
            out << '\n';
        }
    }
}

}  // namespace arn::data
