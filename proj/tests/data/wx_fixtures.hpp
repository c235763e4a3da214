// Wilcoxon signed-rank reference fixtures (one-sided 'less' exact p against
// scipy.stats.wilcoxon, method='exact'). Pairs chosen tie-free so the exact
// path is well defined. Regenerate with tests/data/gen_wx_fixtures.py.
#pragma once
#include <vector>

struct WxFixture {
  std::vector<double> x;
  std::vector<double> y;
  double w_plus;
  double p_less_exact;
};

inline const std::vector<WxFixture>& wx_fixtures() {
  static const std::vector<WxFixture> fixtures = {
    {{0.42799999999999999, -0.57099999999999995, 2.6539999999999999, -1.609, 0.66200000000000003, -0.14299999999999999}, {0.74399999999999999, 0.88200000000000001, 1.8, -1.7969999999999999, 1.171, 1.8500000000000001}, 5, 0.15625},
    {{0.088999999999999996, 0.89600000000000002, -1.863, -1.2390000000000001, 0.96999999999999997, -0.628, -0.063, 0.73099999999999998}, {-1.075, 0.53500000000000003, -1.3380000000000001, -1.8759999999999999, 1.002, -0.062, 0.0050000000000000001, 1.1160000000000001}, 18, 0.52734375},
    {{0.041000000000000002, 1.3300000000000001, 1.579, -0.39500000000000002, -0.82799999999999996, 0.88900000000000001, 0.51100000000000001, 0.249, -0.90800000000000003, 0.64500000000000002}, {1.339, 0.502, 2.9929999999999999, 0.14699999999999999, -0.82299999999999995, 0.22700000000000001, 0.83799999999999997, 0.80000000000000004, -0.60799999999999998, 0.28100000000000003}, 19, 0.2158203125},
    {{-1.1950000000000001, 0.70499999999999996, 0.048000000000000001, 0.28499999999999998, 0.629, 0.71799999999999997, 1.7350000000000001, -0.070999999999999994, -0.25900000000000001, -0.95799999999999996, 0.249, 0.26400000000000001}, {-1.2030000000000001, 1.2789999999999999, 0.63400000000000001, 3.8170000000000002, 0.82099999999999995, 2.3149999999999999, 2.6600000000000001, 0.45600000000000002, 0.66800000000000004, -0.070999999999999994, 0.82399999999999995, 0.66400000000000003}, 1, 0.00048828125},
    {{-1.26, -0.20499999999999999, 0.86499999999999999, 0.035999999999999997, 1.169, 2.5110000000000001, -0.51800000000000002, -0.97399999999999998, -1.1679999999999999, -1.504, -0.27300000000000002, -1.599}, {-2.7810000000000001, -0.124, 2.7509999999999999, 0.84699999999999998, 0.73499999999999999, 2.4039999999999999, 0.72399999999999998, -0.21199999999999999, -0.90200000000000002, -0.010999999999999999, 0.56299999999999994, -1.3149999999999999}, 18, 0.054931640625},
    {{-0.0089999999999999993, 0.30599999999999999, 1.272, -1.0880000000000001, -0.14000000000000001, -0.29699999999999999, -2.0099999999999998, -0.67800000000000005, -1.6100000000000001, 0.10100000000000001, -0.20499999999999999}, {0.81299999999999994, 1.1040000000000001, 0.57299999999999995, -0.51000000000000001, 0.80600000000000005, 1.038, -1.4059999999999999, -0.56899999999999995, -0.83199999999999996, 1.7549999999999999, 0.56999999999999995}, 4, 0.00341796875},
  };
  return fixtures;
}
