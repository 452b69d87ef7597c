#include "paramkl/tensor.hpp"

#include "paramkl/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace paramkl
{

namespace
{

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Index product(const std::vector<Index>& dims)
{
  Index p = 1;
  for (Index n : dims) p *= n;
  return p;
}

std::string dims_string(const std::vector<Index>& dims)
{
  std::ostringstream out;
  for (std::size_t k = 0; k < dims.size(); ++k) out << (k ? "x" : "") << dims[k];
  return out.str();
}

}  // namespace

FullTensor::FullTensor(std::vector<Index> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data))
{
  if (dims_.size() < 2) throw InvalidArgument("tensor order must be at least 2");
  for (Index n : dims_)
    if (n < 1) throw InvalidArgument("tensor mode sizes must be positive");
  if (product(dims_) != static_cast<Index>(data_.size()))
  {
    std::ostringstream msg;
    msg << "tensor of shape " << dims_string(dims_) << " needs " << product(dims_)
        << " entries, got " << data_.size();
    throw DimensionError(msg.str());
  }
  for (double v : data_)
    if (!std::isfinite(v)) throw InvalidArgument("tensor entries must be finite");
}

FullTensor FullTensor::zeros(std::vector<Index> dims)
{
  const Index n = product(dims);
  return FullTensor(std::move(dims), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

Index FullTensor::linear_index(std::span<const Index> index) const
{
  if (index.size() != dims_.size())
    throw InvalidArgument("tensor index has " + std::to_string(index.size()) + " entries, order is " +
                          std::to_string(dims_.size()));
  Index lin = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k)
  {
    if (index[k] < 0 || index[k] >= dims_[k])
      throw InvalidArgument("tensor index " + std::to_string(index[k]) + " out of range for mode " +
                            std::to_string(k) + " of size " + std::to_string(dims_[k]));
    lin = lin * dims_[k] + index[k];
  }
  return lin;
}

double FullTensor::norm() const
{
  return Eigen::Map<const VectorXd>(data_.data(), static_cast<Index>(data_.size())).norm();
}

FullTensor assemble_tensor(std::span<const MatrixXd> factors, const FullTensor& coefficients)
{
  const auto& cdims = coefficients.dims();
  if (factors.size() != cdims.size())
    throw DimensionError("assemble_tensor: need one factor matrix per mode (" +
                         std::to_string(cdims.size()) + "), got " + std::to_string(factors.size()));
  for (std::size_t k = 0; k < factors.size(); ++k)
    if (factors[k].cols() != cdims[k])
    {
      std::ostringstream msg;
      msg << "assemble_tensor: factor " << k << " has " << factors[k].cols()
          << " columns but coefficient mode " << k << " has size " << cdims[k];
      throw DimensionError(msg.str());
    }

  std::vector<Index> dims = cdims;
  std::vector<double> current = coefficients.data();
  for (std::size_t k = 0; k < factors.size(); ++k)
  {
    const MatrixXd& a = factors[k];
    Index pre = 1, post = 1;
    for (std::size_t i = 0; i < k; ++i) pre *= dims[i];
    for (std::size_t i = k + 1; i < dims.size(); ++i) post *= dims[i];
    const Index in = dims[k];
    const Index out_n = a.rows();
    std::vector<double> next(static_cast<std::size_t>(pre * out_n * post));
    for (Index p = 0; p < pre; ++p)
    {
      Eigen::Map<const RowMatrix> slice(current.data() + p * in * post, in, post);
      Eigen::Map<RowMatrix> target(next.data() + p * out_n * post, out_n, post);
      target.noalias() = a * slice;
    }
    dims[k] = out_n;
    current = std::move(next);
  }
  return FullTensor(std::move(dims), std::move(current));
}

MatrixXd TTCore::slice(Index i) const
{
  MatrixXd s(left_rank, right_rank);
  for (Index a = 0; a < left_rank; ++a)
    for (Index b = 0; b < right_rank; ++b) s(a, b) = (*this)(a, i, b);
  return s;
}

std::vector<Index> TTRepresentation::mode_dims() const
{
  std::vector<Index> dims;
  for (const auto& c : cores) dims.push_back(c.mode_dim);
  return dims;
}

std::vector<Index> TTRepresentation::ranks() const
{
  std::vector<Index> r;
  for (std::size_t k = 0; k + 1 < cores.size(); ++k) r.push_back(cores[k].right_rank);
  return r;
}

void TTRepresentation::validate() const
{
  if (cores.empty()) throw InvalidArgument("tensor train has no cores");
  if (cores.front().left_rank != 1 || cores.back().right_rank != 1)
    throw InvalidArgument("tensor train boundary ranks must be 1");
  for (std::size_t k = 0; k < cores.size(); ++k)
  {
    const auto& c = cores[k];
    if (c.left_rank < 1 || c.mode_dim < 1 || c.right_rank < 1)
      throw InvalidArgument("tensor train core " + std::to_string(k) + " has an empty dimension");
    if (static_cast<Index>(c.data.size()) != c.left_rank * c.mode_dim * c.right_rank)
      throw DimensionError("tensor train core " + std::to_string(k) + " has the wrong data size");
    if (k + 1 < cores.size() && c.right_rank != cores[k + 1].left_rank)
      throw DimensionError("tensor train ranks of cores " + std::to_string(k) + " and " +
                           std::to_string(k + 1) + " do not match");
  }
}

double TTRepresentation::left_orthogonality_defect() const
{
  double worst = 0;
  for (std::size_t k = 0; k + 1 < cores.size(); ++k)
  {
    const auto& c = cores[k];
    Eigen::Map<const RowMatrix> u(c.data.data(), c.left_rank * c.mode_dim, c.right_rank);
    const MatrixXd gram = u.transpose() * u;
    worst = std::max(worst,
        (gram - MatrixXd::Identity(c.right_rank, c.right_rank)).cwiseAbs().maxCoeff());
  }
  return worst;
}

TTRepresentation tt_decompose(const FullTensor& t, const TTOptions& options)
{
  if (!(options.tolerance >= 0)) throw InvalidArgument("tt_decompose: tolerance must be >= 0");
  if (options.max_rank && *options.max_rank < 1)
    throw InvalidArgument("tt_decompose: max_rank must be >= 1");

  const auto& dims = t.dims();
  const std::size_t d = dims.size();
  const double norm = t.norm();
  const double budget = options.tolerance * options.tolerance * norm * norm / double(d - 1);
  const double zero_level = options.rank_cutoff * norm;

  TTRepresentation tt;
  tt.discarded.resize(d - 1);
  RowMatrix carry = Eigen::Map<const RowMatrix>(t.data().data(), 1, t.size());
  Index left = 1;

  for (std::size_t k = 0; k + 1 < d; ++k)
  {
    const Index rows = left * dims[k];
    const Index cols = carry.size() / rows;
    Eigen::Map<const RowMatrix> unfolding(carry.data(), rows, cols);
    Eigen::BDCSVD<MatrixXd> svd(MatrixXd(unfolding), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sigma = svd.singularValues();
    const Index available = sigma.size();

    Index numeric = 0;
    while (numeric < available && sigma(numeric) > zero_level) ++numeric;
    // tail(n) = sum_{i >= n} sigma_i^2
    VectorXd tail(available + 1);
    tail(available) = 0;
    for (Index i = available - 1; i >= 0; --i) tail(i) = tail(i + 1) + sigma(i) * sigma(i);
    Index keep = available;
    for (Index n = 0; n <= available; ++n)
      if (tail(n) <= budget)
      {
        keep = n;
        break;
      }
    keep = std::min(keep, numeric);
    if (options.max_rank) keep = std::min(keep, *options.max_rank);
    keep = std::max<Index>(keep, 1);

    for (Index i = keep; i < available; ++i) tt.discarded[k].push_back(sigma(i));

    TTCore core{left, dims[k], keep, std::vector<double>(static_cast<std::size_t>(rows * keep))};
    Eigen::Map<RowMatrix>(core.data.data(), rows, keep) = svd.matrixU().leftCols(keep);
    tt.cores.push_back(std::move(core));

    carry = sigma.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
    left = keep;
  }

  TTCore last{left, dims.back(), 1, std::vector<double>(carry.data(), carry.data() + carry.size())};
  tt.cores.push_back(std::move(last));
  return tt;
}

FullTensor tt_reconstruct(const TTRepresentation& tt)
{
  tt.validate();
  const auto dims = tt.mode_dims();
  double entries = 1;
  for (Index n : dims) entries *= static_cast<double>(n);
  if (entries > static_cast<double>(kMaxReconstructEntries))
  {
    std::ostringstream msg;
    msg << "tt_reconstruct: full tensor would have " << entries << " entries (limit "
        << kMaxReconstructEntries << ")";
    throw InvalidArgument(msg.str());
  }

  RowMatrix acc = RowMatrix::Ones(1, 1);
  for (const auto& core : tt.cores)
  {
    Eigen::Map<const RowMatrix> c(core.data.data(), core.left_rank, core.mode_dim * core.right_rank);
    RowMatrix next = acc * c;
    // (P x n*r) row-major is (P*n x r) row-major.
    acc = Eigen::Map<RowMatrix>(next.data(), next.rows() * core.mode_dim, core.right_rank);
  }
  return FullTensor(dims, std::vector<double>(acc.data(), acc.data() + acc.size()));
}

double tt_eval(const TTRepresentation& tt, std::span<const Index> index)
{
  if (static_cast<Index>(index.size()) != tt.order())
    throw InvalidArgument("tt_eval: index has " + std::to_string(index.size()) +
                          " entries, tensor order is " + std::to_string(tt.order()));
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (std::size_t k = 0; k < tt.cores.size(); ++k)
  {
    const auto& core = tt.cores[k];
    if (index[k] < 0 || index[k] >= core.mode_dim)
      throw InvalidArgument("tt_eval: index " + std::to_string(index[k]) + " out of range for mode " +
                            std::to_string(k) + " of size " + std::to_string(core.mode_dim));
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(core.right_rank);
    for (Index a = 0; a < core.left_rank; ++a)
    {
      const double* row = core.data.data() + (a * core.mode_dim + index[k]) * core.right_rank;
      next += v(a) * Eigen::Map<const Eigen::RowVectorXd>(row, core.right_rank);
    }
    v = std::move(next);
  }
  return v(0);
}

double tt_error_bound(const std::vector<std::vector<double>>& discarded)
{
  double sum = 0;
  for (const auto& split : discarded)
    for (double s : split) sum += s * s;
  return std::sqrt(sum);
}

}  // namespace paramkl
