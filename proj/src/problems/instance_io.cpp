#include "minmax/problems/instance_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "minmax/rng.hpp"

namespace minmax {

static_assert(std::endian::native == std::endian::little,
              "instance container assumes a little-endian host");

MinMaxProblem InstanceData::problem() const {
  if (family == "qvm" && qvm) return qvm_problem(qvm);
  if (family == "trr" && trr) return trr_problem(trr);
  if (family == "pc" && pc) return pc_problem(pc);
  throw ArgumentError(fmt::format("instance has no payload for family '{}'", family));
}

std::optional<LinearConstraint> InstanceData::constraint() const {
  if (!constraint_A || !constraint_b) return std::nullopt;
  return LinearConstraint::from_dense(*constraint_A, *constraint_b);
}

Vector InstanceData::initial_x() const {
  if (family == "qvm") return qvm_initial_point(*qvm);
  if (family == "trr") return Vector::Zero(trr->features());
  if (family == "pc") return Vector::Zero(pc->K * pc->N);
  throw ArgumentError("initial_x: unknown family");
}

Vector InstanceData::initial_y() const { return Vector::Zero(problem().n_y); }

InstanceData make_instance(std::shared_ptr<const QvmInstance> q) {
  InstanceData d;
  d.family = "qvm";
  d.seed = q->seed;
  d.qvm = std::move(q);
  return d;
}

InstanceData make_instance(std::shared_ptr<const TrrInstance> t) {
  InstanceData d;
  d.family = "trr";
  d.trr = std::move(t);
  return d;
}

InstanceData make_instance(std::shared_ptr<const PcInstance> p) {
  InstanceData d;
  d.family = "pc";
  d.seed = p->seed;
  d.pc = std::move(p);
  return d;
}

void attach_random_constraint(InstanceData& data, Index rows, std::uint64_t seed) {
  if (rows <= 0) throw ArgumentError("constraint needs at least one row");
  const MinMaxProblem prob = data.problem();
  RandomStream rng(seed, "constraint/A");
  RandomStream pt(seed, "constraint/point");
  Matrix A(rows, prob.n_x);
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < rows; ++i) A(i, j) = rng.normal();
  }
  Vector xf(prob.n_x);
  switch (prob.x_set.kind) {
    case SetKind::Simplex: {
      // normalized exponentials: a uniform draw from the simplex
      for (Index i = 0; i < xf.size(); ++i) xf[i] = -std::log(1.0 - pt.uniform());
      xf /= xf.sum();
      break;
    }
    case SetKind::Box:
      for (Index i = 0; i < xf.size(); ++i) xf[i] = pt.uniform(prob.x_set.lo, prob.x_set.hi);
      break;
    case SetKind::Whole:
      for (Index i = 0; i < xf.size(); ++i) xf[i] = pt.normal();
      break;
  }
  data.constraint_A = A;
  data.constraint_b = A * xf;
}

namespace {

constexpr char kMagic[8] = {'M', 'M', 'X', 'I', 'N', 'S', 'T', '\x01'};

struct Sparse {
  Index rows = 0;
  Index cols = 0;
  std::vector<Eigen::Triplet<double>> entries;
};

using Field = std::variant<std::int64_t, double, std::string, Matrix, Sparse>;

enum class Tag : std::uint8_t { Int = 1, Real = 2, Text = 3, Dense = 4, SparseT = 5 };

class Writer {
 public:
  void put(const std::string& name, const Field& f) { fields_.emplace_back(name, f); }
  void put_vec(const std::string& name, const Vector& v) { put(name, Matrix(v)); }
  void put_vec(const std::string& name, const std::vector<double>& v) {
    put(name, Matrix(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()))));
  }
  void put_sparse(const std::string& name, const SparseMatrix& s) {
    Sparse sp{s.rows(), s.cols(), {}};
    for (Index c = 0; c < s.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(s, c); it; ++it) sp.entries.emplace_back(it.row(), it.col(), it.value());
    }
    put(name, sp);
  }

  std::string bytes() const {
    std::string out(kMagic, sizeof kMagic);
    raw(out, static_cast<std::uint32_t>(fields_.size()));
    for (const auto& [name, f] : fields_) {
      raw(out, static_cast<std::uint16_t>(name.size()));
      out += name;
      std::visit([&](const auto& v) { encode(out, v); }, f);
    }
    return out;
  }

 private:
  template <class T>
  static void raw(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
  }
  static void encode(std::string& out, std::int64_t v) {
    raw(out, Tag::Int);
    raw(out, v);
  }
  static void encode(std::string& out, double v) {
    raw(out, Tag::Real);
    raw(out, v);
  }
  static void encode(std::string& out, const std::string& v) {
    raw(out, Tag::Text);
    raw(out, static_cast<std::uint64_t>(v.size()));
    out += v;
  }
  static void encode(std::string& out, const Matrix& m) {
    raw(out, Tag::Dense);
    raw(out, static_cast<std::uint64_t>(m.rows()));
    raw(out, static_cast<std::uint64_t>(m.cols()));
    out.append(reinterpret_cast<const char*>(m.data()), static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  static void encode(std::string& out, const Sparse& s) {
    raw(out, Tag::SparseT);
    raw(out, static_cast<std::uint64_t>(s.rows));
    raw(out, static_cast<std::uint64_t>(s.cols));
    raw(out, static_cast<std::uint64_t>(s.entries.size()));
    for (const auto& t : s.entries) {
      raw(out, static_cast<std::uint64_t>(t.row()));
      raw(out, static_cast<std::uint64_t>(t.col()));
      raw(out, t.value());
    }
  }

  std::vector<std::pair<std::string, Field>> fields_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {
    if (data_.size() < sizeof kMagic || std::memcmp(data_.data(), kMagic, sizeof kMagic) != 0) {
      throw ParseError("not a minmax instance file (bad magic)");
    }
    pos_ = sizeof kMagic;
    const auto count = raw<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto len = raw<std::uint16_t>();
      std::string name = bytes(len);
      fields_[name] = decode();
    }
  }

  bool has(const std::string& name) const { return fields_.count(name) != 0; }

  template <class T>
  const T& get(const std::string& name) const {
    const auto it = fields_.find(name);
    if (it == fields_.end()) throw ParseError(fmt::format("instance file lacks field '{}'", name));
    const T* v = std::get_if<T>(&it->second);
    if (!v) throw ParseError(fmt::format("instance field '{}' has the wrong type", name));
    return *v;
  }
  Index integer(const std::string& name) const { return static_cast<Index>(get<std::int64_t>(name)); }
  double real(const std::string& name) const { return get<double>(name); }
  Vector vec(const std::string& name) const {
    const Matrix& m = get<Matrix>(name);
    if (m.cols() != 1) throw ParseError(fmt::format("instance field '{}' is not a vector", name));
    return m.col(0);
  }
  std::vector<double> stdvec(const std::string& name) const {
    const Vector v = vec(name);
    return {v.data(), v.data() + v.size()};
  }
  template <class S>
  S sparse(const std::string& name) const {
    const Sparse& sp = get<Sparse>(name);
    S s(sp.rows, sp.cols);
    s.setFromTriplets(sp.entries.begin(), sp.entries.end());
    s.makeCompressed();
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ParseError("instance file is truncated");
  }
  template <class T>
  T raw() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Index dim() {
    const auto v = raw<std::uint64_t>();
    if (v > (1ULL << 40)) throw ParseError("instance file has an implausible dimension");
    return static_cast<Index>(v);
  }
  Field decode() {
    switch (raw<Tag>()) {
      case Tag::Int:
        return raw<std::int64_t>();
      case Tag::Real:
        return raw<double>();
      case Tag::Text:
        return bytes(static_cast<std::size_t>(dim()));
      case Tag::Dense: {
        const Index r = dim();
        const Index c = dim();
        const std::size_t n = static_cast<std::size_t>(r * c) * sizeof(double);
        need(n);
        Matrix m(r, c);
        std::memcpy(m.data(), data_.data() + pos_, n);
        pos_ += n;
        return m;
      }
      case Tag::SparseT: {
        Sparse s;
        s.rows = dim();
        s.cols = dim();
        const Index nnz = dim();
        s.entries.reserve(static_cast<std::size_t>(nnz));
        for (Index i = 0; i < nnz; ++i) {
          const Index r = dim();
          const Index c = dim();
          const double v = raw<double>();
          if (r >= s.rows || c >= s.cols) throw ParseError("sparse entry out of range");
          s.entries.emplace_back(r, c, v);
        }
        return s;
      }
    }
    throw ParseError("instance file has an unknown field type");
  }

  std::string data_;
  std::size_t pos_ = 0;
  std::map<std::string, Field> fields_;
};

std::int64_t as_int(Index v) { return static_cast<std::int64_t>(v); }

}  // namespace

void save_instance(const std::string& path, const InstanceData& data) {
  const MinMaxProblem prob = data.problem();
  Writer w;
  w.put("family", data.family);
  w.put("seed", static_cast<std::int64_t>(data.seed));
  w.put("dims.n_x", as_int(prob.n_x));
  w.put("dims.n_y", as_int(prob.n_y));
  w.put("const.m", prob.m);
  w.put("const.L_x", prob.L_x);
  w.put("const.L_y", prob.L_y);
  w.put("const.D_y", prob.D_y);

  if (data.family == "qvm") {
    const QvmInstance& q = *data.qvm;
    w.put("qvm.n", as_int(q.n));
    w.put("qvm.l", as_int(q.l));
    w.put("qvm.k", as_int(q.k));
    w.put_vec("qvm.alpha", q.alpha);
    w.put_vec("qvm.beta", q.beta);
    w.put_vec("qvm.lambda_max", q.lambda_max);
    w.put_vec("qvm.lambda_min", q.lambda_min);
    w.put("qvm.M_target", q.M_target);
    w.put("qvm.m_target", q.m_target);
    w.put("qvm.density", q.density);
    for (Index i = 0; i < q.k; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      w.put_sparse(fmt::format("qvm.C.{}", i), q.C[iu]);
      w.put_sparse(fmt::format("qvm.B.{}", i), q.B[iu]);
      w.put_vec(fmt::format("qvm.D.{}", i), q.D[iu]);
      w.put_vec(fmt::format("qvm.d.{}", i), q.d[iu]);
    }
  } else if (data.family == "trr") {
    const TrrInstance& t = *data.trr;
    w.put_sparse("trr.A", SparseMatrix(t.A));
    w.put_vec("trr.b", t.b);
    w.put("trr.alpha", t.alpha);
  } else if (data.family == "pc") {
    const PcInstance& p = *data.pc;
    w.put("pc.N", as_int(p.N));
    w.put("pc.K", as_int(p.K));
    w.put_vec("pc.A", p.A);
    w.put("pc.B", p.B);
    w.put("pc.sigma", p.sigma);
    w.put("pc.R", p.R);
  }
  if (data.constraint_A && data.constraint_b) {
    w.put("constraint.A", *data.constraint_A);
    w.put_vec("constraint.b", *data.constraint_b);
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write '{}'", path));
  const std::string bytes = w.bytes();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(fmt::format("write to '{}' failed", path));
}

InstanceData load_instance(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(fmt::format("cannot open instance file '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  const Reader r(ss.str());

  InstanceData data;
  data.family = r.get<std::string>("family");
  data.seed = static_cast<std::uint64_t>(r.get<std::int64_t>("seed"));
  if (data.family == "qvm") {
    auto q = std::make_shared<QvmInstance>();
    q->n = r.integer("qvm.n");
    q->l = r.integer("qvm.l");
    q->k = r.integer("qvm.k");
    q->alpha = r.stdvec("qvm.alpha");
    q->beta = r.stdvec("qvm.beta");
    q->lambda_max = r.stdvec("qvm.lambda_max");
    q->lambda_min = r.stdvec("qvm.lambda_min");
    q->M_target = r.real("qvm.M_target");
    q->m_target = r.real("qvm.m_target");
    q->density = r.real("qvm.density");
    q->seed = data.seed;
    for (Index i = 0; i < q->k; ++i) {
      q->C.push_back(r.sparse<SparseMatrix>(fmt::format("qvm.C.{}", i)));
      q->B.push_back(r.sparse<SparseMatrix>(fmt::format("qvm.B.{}", i)));
      q->D.push_back(r.vec(fmt::format("qvm.D.{}", i)));
      q->d.push_back(r.vec(fmt::format("qvm.d.{}", i)));
    }
    q->update_P();
    q->validate();
    data.qvm = q;
  } else if (data.family == "trr") {
    auto t = std::make_shared<TrrInstance>();
    t->A = r.sparse<RowSparseMatrix>("trr.A");
    t->b = r.vec("trr.b");
    t->alpha = r.real("trr.alpha");
    t->validate();
    data.trr = t;
  } else if (data.family == "pc") {
    auto p = std::make_shared<PcInstance>();
    p->N = r.integer("pc.N");
    p->K = r.integer("pc.K");
    p->A = r.stdvec("pc.A");
    p->B = r.get<Matrix>("pc.B");
    p->sigma = r.real("pc.sigma");
    p->R = r.real("pc.R");
    p->seed = data.seed;
    p->validate();
    data.pc = p;
  } else {
    throw ParseError(fmt::format("unknown instance family '{}'", data.family));
  }
  if (r.has("constraint.A")) {
    data.constraint_A = r.get<Matrix>("constraint.A");
    data.constraint_b = r.vec("constraint.b");
    if (data.constraint_A->rows() != data.constraint_b->size()) {
      throw ParseError("constraint A and b disagree in row count");
    }
  }
  const MinMaxProblem prob = data.problem();
  if (prob.n_x != r.integer("dims.n_x") || prob.n_y != r.integer("dims.n_y")) {
    throw ParseError("instance payload disagrees with its header dimensions");
  }
  if (data.constraint_A && data.constraint_A->cols() != prob.n_x) {
    throw ParseError("constraint column count differs from n_x");
  }
  return data;
}

std::string instance_manifest(const InstanceData& data) {
  const MinMaxProblem prob = data.problem();
  std::string s;
  auto line = [&s](std::string_view key, const auto& value) { s += fmt::format("{} = {}\n", key, value); };
  line("family", data.family);
  line("seed", data.seed);
  line("n_x", prob.n_x);
  line("n_y", prob.n_y);
  if (data.family == "qvm") {
    const QvmInstance& q = *data.qvm;
    line("n", q.n);
    line("l", q.l);
    line("k", q.k);
    line("M", q.M_target);
    line("m", q.m_target);
    line("density", q.density);
  } else if (data.family == "trr") {
    line("samples", data.trr->samples());
    line("features", data.trr->features());
    line("alpha", data.trr->alpha);
    line("nonzeros", data.trr->A.nonZeros());
  } else if (data.family == "pc") {
    line("N", data.pc->N);
    line("K", data.pc->K);
    line("sigma", data.pc->sigma);
    line("R", data.pc->R);
  }
  line("const.m", prob.m);
  line("const.L_x", prob.L_x);
  line("const.L_y", prob.L_y);
  line("const.D_y", prob.D_y);
  if (data.constraint_A) line("constraint_rows", data.constraint_A->rows());
  return s;
}

void save_instance_with_manifest(const std::string& path, const InstanceData& data) {
  save_instance(path, data);
  const std::string mpath = path + ".manifest";
  std::ofstream f(mpath);
  if (!f) throw Error(fmt::format("cannot write '{}'", mpath));
  f << instance_manifest(data);
}

}  // namespace minmax
