#include "gcrlab/divcurl.hpp"

#include <cmath>
#include <sstream>

#include "gcrlab/errors.hpp"

namespace gcr {
namespace {

void check_index(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string(what) + ": index out of range");
}

double max_abs(const StructuredVectorField& w) {
  double m = 0.0;
  for (int i = 0; i < w.dimension(); ++i) {
    for (double v : w.component(i)) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

std::string VectorProvenance::label() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Generic: out << "vector"; break;
    case Kind::CodazziDiv: out << "codazzi-div"; break;
    case Kind::CodazziCurl: out << "codazzi-curl"; break;
    case Kind::RicciDiv: out << "ricci-div"; break;
    case Kind::RicciCurl: out << "ricci-curl"; break;
  }
  out << "(";
  for (std::size_t i = 0; i < indices.size(); ++i) out << (i ? "," : "") << indices[i] + 1;
  out << ")";
  return out.str();
}

StructuredVectorField::StructuredVectorField(GridPtr grid, VectorProvenance tag)
    : grid_(std::move(grid)),
      data_(static_cast<std::size_t>(grid_->dimension()) * grid_->num_nodes(), 0.0),
      tag_(std::move(tag)) {}

ScalarField numeric_div(const StructuredVectorField& w) {
  ScalarField out(w.grid_ptr());
  std::vector<double> tmp(w.grid().num_nodes());
  for (int i = 0; i < w.dimension(); ++i) {
    central_difference(w.grid(), i, w.component(i), tmp);
    for (std::size_t node = 0; node < tmp.size(); ++node) out[node] += tmp[node];
  }
  return out;
}

TensorField numeric_curl(const StructuredVectorField& w) {
  const int d = w.dimension();
  TensorField out(w.grid_ptr(),
                  make_layout({IndexRole::Tangent, IndexRole::Tangent}, d, 0, {{0, 1, -1}}));
  const std::size_t nodes = w.grid().num_nodes();
  std::vector<double> dj_wi(nodes);
  std::vector<double> di_wj(nodes);
  const IndexLayout& lay = out.layout();
  for (int s = 0; s < lay.num_slots(); ++s) {
    const int i = lay.slot_index(s)[0];
    const int j = lay.slot_index(s)[1];
    central_difference(w.grid(), j, w.component(i), dj_wi);
    central_difference(w.grid(), i, w.component(j), di_wj);
    auto dst = out.slot(s);
    for (std::size_t node = 0; node < nodes; ++node) dst[node] = dj_wi[node] - di_wj[node];
  }
  return out;
}

ScalarField dot(const StructuredVectorField& w, const StructuredVectorField& v) {
  require_same_grid(w.grid(), v.grid(), "dot");
  ScalarField out(w.grid_ptr());
  for (int i = 0; i < w.dimension(); ++i) {
    const auto a = w.component(i);
    const auto b = v.component(i);
    for (std::size_t node = 0; node < a.size(); ++node) out[node] += a[node] * b[node];
  }
  return out;
}

std::pair<StructuredVectorField, StructuredVectorField> build_codazzi_fields(
    const ImmersionFields& f, int a, int j, int k, int l) {
  const int d = f.dimension();
  check_index(a >= 0 && a < f.codimension() && j >= 0 && j < d && k >= 0 && l < d && k < l,
              "build_codazzi_fields");
  using Kind = VectorProvenance::Kind;
  StructuredVectorField div(f.grid_ptr(), {Kind::CodazziDiv, {a, j, k, l}});
  StructuredVectorField curl(f.grid_ptr(), {Kind::CodazziCurl, {a, j}});
  auto slot_k = div.component(k);
  auto slot_l = div.component(l);
  for (std::size_t node = 0; node < slot_k.size(); ++node) {
    slot_k[node] = f.h.at(node, {a, l, j});
    slot_l[node] = -f.h.at(node, {a, k, j});
  }
  for (int i = 0; i < d; ++i) {
    auto c = curl.component(i);
    for (std::size_t node = 0; node < c.size(); ++node) c[node] = f.h.at(node, {a, i, j});
  }
  return {std::move(div), std::move(curl)};
}

std::pair<StructuredVectorField, StructuredVectorField> build_ricci_fields(
    const ImmersionFields& f, int a, int b, int k, int l) {
  const int d = f.dimension();
  const int n_co = f.codimension();
  check_index(a >= 0 && a < n_co && b >= 0 && b < n_co && k >= 0 && l < d && k < l,
              "build_ricci_fields");
  using Kind = VectorProvenance::Kind;
  StructuredVectorField div(f.grid_ptr(), {Kind::RicciDiv, {a, b, k, l}});
  StructuredVectorField curl(f.grid_ptr(), {Kind::RicciCurl, {a, b}});
  auto slot_k = div.component(k);
  auto slot_l = div.component(l);
  for (std::size_t node = 0; node < slot_k.size(); ++node) {
    slot_k[node] = f.kappa.at(node, {a, l, b});
    slot_l[node] = -f.kappa.at(node, {a, k, b});
  }
  for (int i = 0; i < d; ++i) {
    auto c = curl.component(i);
    for (std::size_t node = 0; node < c.size(); ++node) c[node] = f.kappa.at(node, {a, i, b});
  }
  return {std::move(div), std::move(curl)};
}

std::string identity_name(PairingIdentity id) {
  switch (id) {
    case PairingIdentity::CodazziCodazzi: return "codazzi-codazzi";
    case PairingIdentity::RicciRicci: return "ricci-ricci";
    case PairingIdentity::RicciCodazzi: return "ricci-codazzi";
  }
  return "unknown";
}

double PairingReport::max_relative() const {
  double m = 0.0;
  for (const auto& s : summaries) m = std::max(m, s.max_relative);
  return m;
}

PairingReport pairing_identities(const ImmersionFields& f, bool keep_fields) {
  const int d = f.dimension();
  const int n_co = f.codimension();
  const std::size_t nodes = f.grid().num_nodes();

  // Every div- and curl-field is built once and reused across tuples.
  std::vector<StructuredVectorField> cod_div(static_cast<std::size_t>(n_co * d * d * d));
  std::vector<StructuredVectorField> cod_curl(static_cast<std::size_t>(n_co * d));
  std::vector<StructuredVectorField> ric_div(static_cast<std::size_t>(n_co * n_co * d * d));
  std::vector<StructuredVectorField> ric_curl(static_cast<std::size_t>(n_co * n_co));
  auto cd = [&](int a, int j, int k, int l) -> StructuredVectorField& {
    return cod_div[((a * d + j) * d + k) * d + l];
  };
  auto rd = [&](int a, int b, int k, int l) -> StructuredVectorField& {
    return ric_div[((a * n_co + b) * d + k) * d + l];
  };
  for (int a = 0; a < n_co; ++a) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
          auto [div, curl] = build_codazzi_fields(f, a, j, k, l);
          cd(a, j, k, l) = std::move(div);
          cod_curl[a * d + j] = std::move(curl);
        }
      }
    }
    for (int b = 0; b < n_co; ++b) {
      for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
          auto [div, curl] = build_ricci_fields(f, a, b, k, l);
          rd(a, b, k, l) = std::move(div);
          ric_curl[a * n_co + b] = std::move(curl);
        }
      }
    }
  }
  std::vector<double> div_scale_c(cod_div.size(), 0.0), div_scale_r(ric_div.size(), 0.0);
  std::vector<double> curl_scale_c(cod_curl.size()), curl_scale_r(ric_curl.size());
  for (std::size_t i = 0; i < cod_div.size(); ++i) {
    if (cod_div[i].grid_ptr()) div_scale_c[i] = max_abs(cod_div[i]);
  }
  for (std::size_t i = 0; i < ric_div.size(); ++i) {
    if (ric_div[i].grid_ptr()) div_scale_r[i] = max_abs(ric_div[i]);
  }
  for (std::size_t i = 0; i < cod_curl.size(); ++i) curl_scale_c[i] = max_abs(cod_curl[i]);
  for (std::size_t i = 0; i < ric_curl.size(); ++i) curl_scale_r[i] = max_abs(ric_curl[i]);

  PairingReport report;
  for (auto id : {PairingIdentity::CodazziCodazzi, PairingIdentity::RicciRicci,
                  PairingIdentity::RicciCodazzi}) {
    PairingSummary summary;
    summary.identity = id;
    report.summaries.push_back(std::move(summary));
  }

  auto record = [&](PairingIdentity id, std::vector<int> indices,
                    const StructuredVectorField& div, const StructuredVectorField& curl,
                    double scale, auto&& target_at) {
    PairingEntry e{id, std::move(indices), {}, {}, 0.0, scale};
    ScalarField product = dot(div, curl);
    ScalarField target(f.grid_ptr());
    for (std::size_t node = 0; node < nodes; ++node) {
      target[node] = target_at(node);
      e.max_discrepancy = std::max(e.max_discrepancy, std::abs(product[node] - target[node]));
    }
    auto& s = report.summaries[static_cast<int>(id)];
    ++s.tuples;
    const double rel = e.max_discrepancy == 0.0 ? 0.0 : e.max_discrepancy / std::max(scale, 1e-300);
    if (s.worst.empty() || e.max_discrepancy > s.max_discrepancy) s.worst = e.indices;
    s.max_discrepancy = std::max(s.max_discrepancy, e.max_discrepancy);
    s.max_relative = std::max(s.max_relative, rel);
    if (keep_fields) {
      e.product = std::move(product);
      e.target = std::move(target);
    }
    report.entries.push_back(std::move(e));
  };

  for (int a = 0; a < n_co; ++a) {
    for (int b = 0; b < n_co; ++b) {
      for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
          for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
              record(PairingIdentity::CodazziCodazzi, {a, b, i, j, k, l}, cd(a, j, k, l),
                     cod_curl[b * d + i], div_scale_c[((a * d + j) * d + k) * d + l] *
                                              curl_scale_c[b * d + i],
                     [&](std::size_t node) {
                       return f.h.at(node, {a, l, j}) * f.h.at(node, {b, k, i}) -
                              f.h.at(node, {a, k, j}) * f.h.at(node, {b, l, i});
                     });
            }
            record(PairingIdentity::RicciCodazzi, {a, b, i, k, l}, cd(b, i, k, l),
                   ric_curl[a * n_co + b],
                   div_scale_c[((b * d + i) * d + k) * d + l] * curl_scale_r[a * n_co + b],
                   [&](std::size_t node) {
                     return f.kappa.at(node, {a, k, b}) * f.h.at(node, {b, l, i}) -
                            f.kappa.at(node, {a, l, b}) * f.h.at(node, {b, k, i});
                   });
          }
          for (int c = 0; c < n_co; ++c) {
            record(PairingIdentity::RicciRicci, {a, b, c, k, l}, rd(b, c, k, l),
                   ric_curl[a * n_co + b],
                   div_scale_r[((b * n_co + c) * d + k) * d + l] * curl_scale_r[a * n_co + b],
                   [&](std::size_t node) {
                     return f.kappa.at(node, {a, k, b}) * f.kappa.at(node, {b, l, c}) -
                            f.kappa.at(node, {a, l, b}) * f.kappa.at(node, {b, k, c});
                   });
          }
        }
      }
    }
  }
  return report;
}

}  // namespace gcr
