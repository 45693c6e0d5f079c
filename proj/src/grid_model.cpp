/*
 * Copyright 2026 The gridgp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gridgp/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace gridgp {

namespace {

void require_symmetric(const Matrix& m, const char* what) {
  const double denom = std::max(1.0, m.norm());
  if ((m - m.transpose()).norm() > 1e-10 * denom) {
    throw ConfigError(std::string(what) + " must be symmetric (relative Frobenius asymmetry > 1e-10)");
  }
}

Matrix scaled_laplacian(const GridModel& model) {
  const Vector inv_sqrt_m = model.inertia.array().rsqrt();
  Matrix s = inv_sqrt_m.asDiagonal() * model.laplacian * inv_sqrt_m.asDiagonal();
  return 0.5 * (s + s.transpose());
}

}  // namespace

void GridModel::validate() const {
  if (n < 1) throw ConfigError("model must contain at least one generator");
  if (inertia.size() != n || laplacian.rows() != n || laplacian.cols() != n) {
    throw ConfigError("model dimensions are inconsistent with n=" + std::to_string(n));
  }
  if (static_cast<int>(generator_ids.size()) != n) {
    throw ConfigError("generator_ids must list exactly n labels");
  }
  if (std::set<int>(generator_ids.begin(), generator_ids.end()).size() != generator_ids.size()) {
    throw ConfigError("generator_ids must be distinct");
  }
  for (int i = 0; i < n; ++i) {
    if (!(inertia[i] > 0.0) || !std::isfinite(inertia[i])) {
      throw ConfigError("inertia of generator " + std::to_string(generator_ids[i]) +
                        " must be strictly positive");
    }
  }
  if (!(damping_ratio > 0.0) || !std::isfinite(damping_ratio)) {
    throw ConfigError("damping ratio gamma must be strictly positive");
  }
  require_symmetric(laplacian, "laplacian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(scaled_laplacian(*this), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue check of M^-1/2 L M^-1/2 failed");
  const double lo = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (lo < -1e-8 * scale) {
    throw ConfigError("M^-1/2 L M^-1/2 is not positive semidefinite (min eigenvalue " +
                      format_double(lo) + ")");
  }
}

int GridModel::index_of_id(int generator_id) const {
  for (int i = 0; i < n; ++i) {
    if (generator_ids[i] == generator_id) return i;
  }
  return -1;
}

Matrix kron_reduce(const Matrix& full_laplacian, const std::vector<int>& generator_buses) {
  const int nb = static_cast<int>(full_laplacian.rows());
  if (full_laplacian.cols() != nb) throw ConfigError("kron_reduce: matrix must be square");
  require_symmetric(full_laplacian, "kron_reduce: input");

  std::vector<char> is_gen(nb, 0);
  for (int b : generator_buses) {
    if (b < 0 || b >= nb) {
      throw ConfigError("kron_reduce: generator bus " + std::to_string(b) + " out of range");
    }
    if (is_gen[b]) throw ConfigError("kron_reduce: duplicate generator bus " + std::to_string(b));
    is_gen[b] = 1;
  }
  if (generator_buses.empty()) throw ConfigError("kron_reduce: generator bus set is empty");

  std::vector<int> interior;
  for (int b = 0; b < nb; ++b) {
    if (!is_gen[b]) interior.push_back(b);
  }
  const int ng = static_cast<int>(generator_buses.size());
  if (interior.empty()) {
    Matrix out(ng, ng);
    for (int i = 0; i < ng; ++i) {
      for (int j = 0; j < ng; ++j) out(i, j) = full_laplacian(generator_buses[i], generator_buses[j]);
    }
    return out;
  }

  const int ni = static_cast<int>(interior.size());
  Matrix l_gg(ng, ng), l_gi(ng, ni), l_ii(ni, ni);
  for (int i = 0; i < ng; ++i) {
    for (int j = 0; j < ng; ++j) l_gg(i, j) = full_laplacian(generator_buses[i], generator_buses[j]);
    for (int j = 0; j < ni; ++j) l_gi(i, j) = full_laplacian(generator_buses[i], interior[j]);
  }
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < ni; ++j) l_ii(i, j) = full_laplacian(interior[i], interior[j]);
  }

  Eigen::FullPivLU<Matrix> lu(l_ii);
  if (!lu.isInvertible()) {
    // Point at the bus where elimination breaks down: the first column the
    // rank-revealing factorization could not pivot on.
    const int rank = static_cast<int>(lu.rank());
    const int bad_col = lu.permutationQ().indices()[std::min(rank, ni - 1)];
    throw NumericError("kron_reduce: interior block is singular; elimination fails at bus " +
                       std::to_string(interior[bad_col]));
  }
  Matrix schur = l_gg - l_gi * lu.solve(l_gi.transpose());
  return 0.5 * (schur + schur.transpose());
}

EigenBasis eigen_decompose(const GridModel& model) {
  model.validate();
  Eigen::SelfAdjointEigenSolver<Matrix> es(scaled_laplacian(model));
  if (es.info() != Eigen::Success) {
    throw NumericError("eigen_decompose: eigenvalue solver did not converge");
  }
  EigenBasis basis;
  basis.V = es.eigenvectors();
  basis.lambda = es.eigenvalues();  // ascending
  basis.gamma = model.damping_ratio;
  basis.retained_modes.resize(model.n);
  for (int i = 0; i < model.n; ++i) basis.retained_modes[i] = i;
  return basis;
}

double damped_frequency_hz(double lambda, double gamma) {
  const double d = lambda - 0.25 * gamma * gamma;
  return std::sqrt(std::max(d, 0.0)) / (2.0 * std::numbers::pi);
}

EigenBasis select_modes(const EigenBasis& basis, double f_lo_hz, double f_hi_hz) {
  if (!(f_lo_hz >= 0.0) || !(f_lo_hz < f_hi_hz)) {
    throw ConfigError("select_modes: band must satisfy 0 <= f_lo < f_hi");
  }
  EigenBasis out = basis;
  out.retained_modes.clear();
  double f_min = std::numeric_limits<double>::infinity();
  double f_max = 0.0;
  for (int i = 0; i < basis.n(); ++i) {
    const double f = damped_frequency_hz(basis.lambda[i], basis.gamma);
    f_min = std::min(f_min, f);
    f_max = std::max(f_max, f);
    if (f >= f_lo_hz && f <= f_hi_hz) out.retained_modes.push_back(i);
  }
  if (out.retained_modes.empty()) {
    std::ostringstream msg;
    msg << "select_modes: no mode has damped frequency in [" << f_lo_hz << ", " << f_hi_hz
        << "] Hz; widen the band (mode frequencies span [" << f_min << ", " << f_max << "] Hz)";
    throw ConfigError(msg.str());
  }
  return out;
}

GridModel model_from_json(const nlohmann::json& doc) {
  GridModel model;
  try {
    model.n = doc.at("n").get<int>();
    if (doc.contains("generator_ids")) {
      model.generator_ids = doc.at("generator_ids").get<std::vector<int>>();
    } else {
      model.generator_ids.resize(model.n);
      for (int i = 0; i < model.n; ++i) model.generator_ids[i] = i;
    }
    const auto inertia = doc.at("inertia").get<std::vector<double>>();
    model.inertia = Eigen::Map<const Vector>(inertia.data(), inertia.size());

    if (doc.contains("gamma") == doc.contains("damping")) {
      throw ConfigError("model must provide exactly one of gamma (scalar) or damping (array)");
    }
    if (doc.contains("gamma")) {
      model.damping_ratio = doc.at("gamma").get<double>();
    } else {
      const auto damping = doc.at("damping").get<std::vector<double>>();
      if (static_cast<int>(damping.size()) != model.n || model.inertia.size() != model.n) {
        throw ConfigError("damping array must have n entries");
      }
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (int i = 0; i < model.n; ++i) {
        const double ratio = damping[i] / model.inertia[i];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      if (hi - lo > 1e-9 * std::max(1.0, hi)) {
        throw ConfigError(
            "heterogeneous damping is not supported: the SISO eigensystem transform assumes "
            "D = gamma * M; provide damping with a uniform damping/inertia ratio or a scalar gamma");
      }
      model.damping_ratio = 0.5 * (lo + hi);
    }

    if (doc.contains("laplacian") == doc.contains("network")) {
      throw ConfigError("model must provide exactly one of laplacian or network");
    }
    if (doc.contains("laplacian")) {
      const auto flat = doc.at("laplacian").get<std::vector<double>>();
      if (static_cast<int>(flat.size()) != model.n * model.n) {
        throw ConfigError("laplacian must be a dense row-major n*n array");
      }
      model.laplacian = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(flat.data(), model.n, model.n);
    } else {
      const auto& net = doc.at("network");
      const int buses = net.at("buses").get<int>();
      Matrix full = Matrix::Zero(buses, buses);
      for (const auto& br : net.at("branches")) {
        const int f = br.at("from").get<int>();
        const int t = br.at("to").get<int>();
        const double b = br.at("susceptance").get<double>();
        if (f < 0 || f >= buses || t < 0 || t >= buses || f == t) {
          throw ConfigError("network branch endpoints out of range");
        }
        full(f, f) += b;
        full(t, t) += b;
        full(f, t) -= b;
        full(t, f) -= b;
      }
      const auto gen_buses = net.at("generator_buses").get<std::vector<int>>();
      if (static_cast<int>(gen_buses.size()) != model.n) {
        throw ConfigError("network.generator_buses must list one bus per generator");
      }
      model.laplacian = kron_reduce(full, gen_buses);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model document malformed: ") + e.what());
  }
  model.validate();
  return model;
}

nlohmann::json model_to_json(const GridModel& model) {
  nlohmann::json doc;
  doc["format"] = "gridgp-model-v1";
  doc["units"] = {{"inertia", "pu*s^2"}, {"gamma", "1/s"}, {"laplacian", "pu"}};
  doc["n"] = model.n;
  doc["generator_ids"] = model.generator_ids;
  doc["inertia"] = std::vector<double>(model.inertia.data(), model.inertia.data() + model.n);
  doc["gamma"] = model.damping_ratio;
  std::vector<double> flat(model.n * model.n);
  for (int i = 0; i < model.n; ++i) {
    for (int j = 0; j < model.n; ++j) flat[i * model.n + j] = model.laplacian(i, j);
  }
  doc["laplacian"] = flat;
  return doc;
}

GridModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse model file " + path + ": " + e.what());
  }
  return model_from_json(doc);
}

void save_model(const GridModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

}  // namespace gridgp
