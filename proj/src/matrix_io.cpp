#include "beamkal/matrix_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace beamkal {

void save_matrix(const std::string& path, const Mat& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
    out << "cmatrix " << m.rows() << " " << m.cols() << " complex128\n";
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(m.size()) * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            buf.push_back(m(r, c).real());
            buf.push_back(m(r, c).imag());
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_matrix: write failed for " + path);
}

Mat load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("load_matrix: missing header in " + path);
    std::istringstream hdr(header);
    std::string magic, dtype;
    std::int64_t rows = 0, cols = 0;
    hdr >> magic >> rows >> cols >> dtype;
    if (magic != "cmatrix" || dtype != "complex128" || rows < 0 || cols < 0)
        throw std::runtime_error("load_matrix: bad header in " + path);
    std::vector<double> buf(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(double)))
        throw std::runtime_error("load_matrix: truncated payload in " + path);
    Mat m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = cplx(buf[k], buf[k + 1]);
            k += 2;
        }
    }
    return m;
}

}  // namespace beamkal
