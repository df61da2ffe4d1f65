// Sparse text layout modelled on SDPA, extended with an imaginary column.
//
//   * freespec-sdpa-complex v1
//   * objective: present|none
//   m
//   nblocks
//   n_1 n_2 ... n_nblocks
//   b_1 ... b_m
//   matno blkno i j re im      (one line per nonzero upper-triangular entry)
//
// matno 0 is the objective, 1..m the constraints. Indices are 1-based. Lines
// starting with '*' or '"' are comments, except for the objective marker.
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "freespec/sdp.hpp"

namespace freespec::sdp {

namespace {

void write_row(std::ostream& os, int matno, const std::vector<HermitianMatrix>& row) {
  for (size_t k = 0; k < row.size(); ++k) {
    const auto& a = row[k].matrix();
    for (int i = 0; i < a.rows(); ++i)
      for (int j = i; j < a.cols(); ++j)
        if (a(i, j) != Complex(0.0, 0.0))
          os << matno << ' ' << k + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << a(i, j).real() << ' '
             << a(i, j).imag() << '\n';
  }
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw InvalidArgument("sdpa line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_sdpa(std::ostream& os, const SdpProblem& p) {
  p.validate();
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "* freespec-sdpa-complex v1\n";
  os << "* objective: " << (p.objective ? "present" : "none") << '\n';
  os << p.num_constraints() << '\n' << p.num_blocks() << '\n';
  for (int k = 0; k < p.num_blocks(); ++k) os << (k ? " " : "") << p.block_dims[k];
  os << '\n';
  for (int i = 0; i < p.num_constraints(); ++i) os << (i ? " " : "") << p.constraints[i].rhs;
  os << '\n';
  if (p.objective) write_row(os, 0, *p.objective);
  for (int i = 0; i < p.num_constraints(); ++i) write_row(os, i + 1, p.constraints[i].blocks);
  os.precision(old);
}

SdpProblem read_sdpa(std::istream& is) {
  std::vector<std::pair<int, std::string>> lines;
  bool has_objective = false;
  std::string raw;
  for (int no = 1; std::getline(is, raw); ++no) {
    if (raw.rfind("* objective:", 0) == 0) {
      has_objective = raw.find("present") != std::string::npos;
      continue;
    }
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '*' || raw[first] == '"') continue;
    lines.emplace_back(no, raw);
  }
  size_t cursor = 0;
  auto next_line = [&](const char* what) -> std::pair<int, std::istringstream> {
    if (cursor >= lines.size()) fail(lines.empty() ? 0 : lines.back().first, std::string("missing ") + what);
    auto& [no, text] = lines[cursor++];
    return {no, std::istringstream(text)};
  };

  SdpProblem p;
  int m = 0, nb = 0;
  {
    auto [no, ss] = next_line("constraint count");
    if (!(ss >> m) || m < 0) fail(no, "bad constraint count");
  }
  {
    auto [no, ss] = next_line("block count");
    if (!(ss >> nb) || nb < 0) fail(no, "bad block count");
  }
  {
    auto [no, ss] = next_line("block sizes");
    for (int k = 0; k < nb; ++k) {
      int d = 0;
      if (!(ss >> d) || d <= 0) fail(no, "bad block size");
      p.block_dims.push_back(d);
    }
  }
  std::vector<double> b(m);
  if (m > 0) {
    auto [no, ss] = next_line("right-hand side");
    for (int i = 0; i < m; ++i)
      if (!(ss >> b[i])) fail(no, "bad right-hand side entry");
  }
  std::vector<std::vector<CMatrix>> mats(m + 1);
  for (auto& row : mats)
    for (int d : p.block_dims) row.push_back(CMatrix::Zero(d, d));
  while (cursor < lines.size()) {
    auto [no, ss] = next_line("entry");
    int matno, blk, i, j;
    double re, im;
    if (!(ss >> matno >> blk >> i >> j >> re >> im)) fail(no, "expected 'matno blkno i j re im'");
    if (matno < 0 || matno > m) fail(no, "matrix number out of range");
    if (blk < 1 || blk > nb) fail(no, "block number out of range");
    const int d = p.block_dims[blk - 1];
    if (i < 1 || j < 1 || i > d || j > d) fail(no, "entry index out of range");
    if (i > j) fail(no, "entries must be upper triangular");
    if (i == j && im != 0.0) fail(no, "diagonal entry not real");
    if (matno == 0) has_objective = true;
    mats[matno][blk - 1](i - 1, j - 1) = Complex(re, im);
    mats[matno][blk - 1](j - 1, i - 1) = Complex(re, -im);
  }
  auto to_row = [](const std::vector<CMatrix>& ms) {
    std::vector<HermitianMatrix> row;
    for (const auto& a : ms) row.emplace_back(a);
    return row;
  };
  if (has_objective) p.objective = to_row(mats[0]);
  for (int i = 0; i < m; ++i) p.constraints.push_back({to_row(mats[i + 1]), b[i]});
  return p;
}

}  // namespace freespec::sdp
