#ifndef PHOTODYN_FITTING_SPECIAL_HPP
#define PHOTODYN_FITTING_SPECIAL_HPP

namespace photodyn::fit {

// Scaled complementary error function exp(x^2) erfc(x). Finite for all
// x >= -26; decays like 1 / (x sqrt(pi)) for large x.
double erfcx(double x);

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_SPECIAL_HPP
