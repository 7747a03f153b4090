#include "rbss/model.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rbss {

void SolverParams::validate() const {
  if (outer_iters < 1 || inner_iters < 1)
    throw std::invalid_argument("SolverParams: iteration counts must be >= 1");
  if (final_threshold_multiplier <= 0)
    throw std::invalid_argument("SolverParams: final_threshold_multiplier must be > 0");
  if (pinv_tol <= 0 || pinv_tol >= 1)
    throw std::invalid_argument("SolverParams: pinv_tol must lie in (0, 1)");
}

MixingScene assemble_scene(const Mat& A, const Mat& S, const Mat& O,
                           const Mat& N, double sigma) {
  const Index m = A.rows(), n = A.cols(), t = S.cols();
  if (S.rows() != n || O.rows() != m || O.cols() != t || N.rows() != m || N.cols() != t)
    throw std::invalid_argument("assemble_scene: non-conformable shapes");
  for (Index j = 0; j < n; ++j)
    if (std::abs(A.col(j).norm() - 1.0) > 1e-9)
      throw std::invalid_argument("assemble_scene: mixing columns must be unit-norm");
  MixingScene scene;
  scene.A = A;
  scene.S = S;
  scene.O = O;
  scene.N = N;
  scene.sigma = sigma;
  scene.X = A * S + O + N;
  return scene;
}

void save_matrix_csv(const Mat& M, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << M.rows() << "," << M.cols() << "\n";
  char buf[40];
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
      out << buf << (j + 1 < M.cols() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

Mat load_matrix_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty matrix file: " + file.string());
  Index rows = 0, cols = 0;
  {
    std::istringstream header(line);
    char comma = 0;
    if (!(header >> rows >> comma >> cols) || comma != ',' || rows < 1 || cols < 1)
      throw std::runtime_error("bad matrix header in " + file.string());
  }
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated matrix file: " + file.string());
    std::istringstream row(line);
    std::string cell;
    for (Index j = 0; j < cols; ++j) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("short row in " + file.string());
      M(i, j) = std::stod(cell);
    }
  }
  return M;
}

void save_scene(const MixingScene& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  save_matrix_csv(scene.X, dir / "X.csv");
  save_matrix_csv(scene.A, dir / "A.csv");
  save_matrix_csv(scene.S, dir / "S.csv");
  save_matrix_csv(scene.O, dir / "O.csv");
  save_matrix_csv(scene.N, dir / "N.csv");
  save_matrix_csv(Mat::Constant(1, 1, scene.sigma), dir / "sigma.csv");
}

MixingScene load_scene(const std::filesystem::path& dir) {
  MixingScene scene;
  scene.X = load_matrix_csv(dir / "X.csv");
  scene.A = load_matrix_csv(dir / "A.csv");
  scene.S = load_matrix_csv(dir / "S.csv");
  scene.O = load_matrix_csv(dir / "O.csv");
  scene.N = load_matrix_csv(dir / "N.csv");
  scene.sigma = load_matrix_csv(dir / "sigma.csv")(0, 0);
  return scene;
}

}  // namespace rbss
