#include "boostconv/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "boostconv/error.hpp"

namespace boostconv {

namespace {

struct Header {
    std::string object;
    std::string format;
    std::string field;
    std::string symmetry;
    std::string raw;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Next line that is neither blank nor a % comment.
    bool next_data(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (is_blank(line) || line.front() == '%') continue;
            return true;
        }
        return false;
    }

    Header header() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!is_blank(line)) break;
        }
        std::istringstream ss(line);
        Header h;
        std::string banner;
        ss >> banner >> h.object >> h.format >> h.field >> h.symmetry;
        h.raw = line;
        if (lower(banner) != "%%matrixmarket" || h.symmetry.empty()) {
            fail("missing or incomplete %%MatrixMarket header: '" + line + "'");
        }
        h.object = lower(h.object);
        h.format = lower(h.format);
        h.field = lower(h.field);
        h.symmetry = lower(h.symmetry);
        return h;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(source_ + ":" + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& in_;
    std::string source_;
    long line_no_ = 0;
};

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return in;
}

void require_real_field(const Header& h, LineReader& reader) {
    if (h.field != "real" && h.field != "integer" && h.field != "double") {
        reader.fail("unsupported field '" + h.field + "' in header '" + h.raw + "'");
    }
}

}  // namespace

SparseMatrixCSR mm_read_matrix(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    const Header h = reader.header();
    if (h.object != "matrix" || h.format != "coordinate") {
        reader.fail("expected 'matrix coordinate' in header '" + h.raw + "'");
    }
    require_real_field(h, reader);
    const bool symmetric = h.symmetry == "symmetric";
    if (!symmetric && h.symmetry != "general") {
        reader.fail("unsupported symmetry '" + h.symmetry + "' in header '" + h.raw + "'");
    }

    std::string line;
    if (!reader.next_data(line)) reader.fail("missing size line");
    std::int64_t n_rows = 0, n_cols = 0, nnz = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> n_rows >> n_cols >> nnz) || n_rows < 0 || n_cols < 0 || nnz < 0) {
            reader.fail("malformed size line '" + line + "'");
        }
    }
    if (symmetric && n_rows != n_cols) reader.fail("symmetric matrix must be square");

    std::vector<std::int64_t> rows, cols;
    std::vector<double> vals;
    const auto reserve = static_cast<std::size_t>(symmetric ? 2 * nnz : nnz);
    rows.reserve(reserve);
    cols.reserve(reserve);
    vals.reserve(reserve);
    for (std::int64_t t = 0; t < nnz; ++t) {
        if (!reader.next_data(line)) {
            reader.fail("expected " + std::to_string(nnz) + " entries, found " + std::to_string(t));
        }
        std::istringstream ss(line);
        std::int64_t i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v)) reader.fail("malformed entry '" + line + "'");
        if (i < 1 || i > n_rows || j < 1 || j > n_cols) {
            reader.fail("entry (" + std::to_string(i) + "," + std::to_string(j) + ") out of bounds");
        }
        rows.push_back(i - 1);
        cols.push_back(j - 1);
        vals.push_back(v);
        if (symmetric && i != j) {
            rows.push_back(j - 1);
            cols.push_back(i - 1);
            vals.push_back(v);
        }
    }
    if (reader.next_data(line)) reader.fail("more entries than declared");
    return SparseMatrixCSR::from_triplets(n_rows, n_cols, rows, cols, vals);
}

SparseMatrixCSR mm_read_matrix(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return mm_read_matrix(in, path.string());
}

DenseVector mm_read_vector(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    const Header h = reader.header();
    if (h.object != "matrix" || h.format != "array") {
        reader.fail("expected 'matrix array' in header '" + h.raw + "'");
    }
    require_real_field(h, reader);
    if (h.symmetry != "general") {
        reader.fail("unsupported symmetry '" + h.symmetry + "' for a vector");
    }

    std::string line;
    if (!reader.next_data(line)) reader.fail("missing size line");
    std::int64_t n_rows = 0, n_cols = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> n_rows >> n_cols) || n_rows < 0) reader.fail("malformed size line '" + line + "'");
    }
    if (n_cols != 1) {
        reader.fail("expected a single column, found " + std::to_string(n_cols));
    }

    DenseVector v(n_rows);
    for (std::int64_t i = 0; i < n_rows; ++i) {
        if (!reader.next_data(line)) {
            reader.fail("expected " + std::to_string(n_rows) + " values, found " + std::to_string(i));
        }
        std::istringstream ss(line);
        if (!(ss >> v[i])) reader.fail("malformed value '" + line + "'");
    }
    if (reader.next_data(line)) reader.fail("more values than declared");
    return v;
}

DenseVector mm_read_vector(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return mm_read_vector(in, path.string());
}

}  // namespace boostconv
