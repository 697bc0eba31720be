#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chemolimit/grid.hpp"

namespace chemolimit {

struct Point {
  double x;
  double y;
};

struct Polyline {
  std::vector<Point> points;
  bool closed = false;

  double length() const;
};

/// Marching squares with linear edge interpolation. Saddle cells are resolved by comparing
/// the cell average with the level. Output order is deterministic.
std::vector<Polyline> extract_interface(const ScalarField& u, double level);

double total_length(const std::vector<Polyline>& lines);

/// Vertices inserted so that no segment is longer than spacing.
Polyline refine(const Polyline& line, double spacing);

/// sup over points of a of the distance to b, after refining a to the given spacing
/// (0: a quarter of the shortest mean segment length of the inputs).
double directed_hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b, double spacing = 0.0);
double hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b, double spacing = 0.0);
double hausdorff(const Polyline& a, const Polyline& b, double spacing = 0.0);

/// Keys cubic convolution interpolation of node values at (x, y), clamped to the domain.
double interpolate_cubic(const ScalarField& f, double x, double y);

struct ThicknessReport {
  double thickness;  ///< max over sample lines
  double mean;
  int lines_used;
  int lines_skipped;
};

/// Distance between the u = 1 - eta and u = eta crossings along normals of the 1/2 contour.
/// Throws NumericalError if no sample line yields both crossings.
ThicknessReport layer_thickness_report(const ScalarField& u, double eta);
double layer_thickness(const ScalarField& u, double eta);

struct ConvergenceFit {
  double slope;
  double intercept;
  double residual;  ///< root-mean-square residual in log space
  std::vector<std::pair<double, double>> samples;
};

/// Least-squares line through (ln eps, ln metric). Needs >= 3 distinct positive eps and
/// positive metrics; throws DomainError otherwise.
ConvergenceFit fit_rate(const std::vector<std::pair<double, double>>& samples);

struct GenerationReport {
  bool passed;
  double min_u;
  double max_u;
  double worst_upper;    ///< min of u where u0 >= 1/2 + M0 eps
  double worst_lower;    ///< max of u where u0 <= 1/2 - M0 eps
  long upper_nodes;
  long lower_nodes;
  double margin;         ///< smallest slack over all four conditions (negative on failure)
};

/// Checks u in [-eta, 1 + eta], u >= 1 - eta where u0 >= 1/2 + M0 eps and u <= eta where
/// u0 <= 1/2 - M0 eps.
GenerationReport generation_check(const ScalarField& u, const ScalarField& u0, double m0, double eps, double eta);

/// Mean radius about the vertex centroid and max - min radius.
struct CircleFit {
  double cx;
  double cy;
  double mean_radius;
  double spread;
};
CircleFit fit_circle(const std::vector<Polyline>& lines);

}  // namespace chemolimit
