/* Scalar kernels for oriented rectangles (x, y, alpha, h, w).
 *
 * Conventions, shared with the Python fallback backend:
 *   - h is the long side (local y extent), w the short side (local x extent)
 *   - alpha rotates the local frame counter-clockwise, canonical in [0, pi)
 *   - rotation matrix M(a) = [[cos a, -sin a], [sin a, cos a]]
 *
 * Every formula below is written in a fixed evaluation order; the fallback
 * mirrors it expression for expression so both backends agree bitwise
 * (compile with -ffp-contract=off, never -ffast-math).
 */
#ifndef ROTRECT_KERNELS_H
#define ROTRECT_KERNELS_H

#include <math.h>

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif
#ifndef M_PI_2
#define M_PI_2 1.57079632679489661923
#endif

/* Reduce an angle modulo pi into [0, pi).  fmod keeps |result| < pi; the
 * only subtlety is a negative remainder so close to zero that adding pi
 * rounds back up to pi itself. */
static inline double rk_angle_mod_pi(double alpha) {
    double a = fmod(alpha, M_PI);
    if (a < 0.0) a += M_PI;
    if (a >= M_PI) a = 0.0;
    return a + 0.0; /* -0.0 -> +0.0 */
}

/* Canonicalize sides/angle in place: long side first, angle in [0, pi).
 * Swapping the sides turns the local frame by a quarter turn. */
static inline void rk_canon(double *alpha, double *h, double *w) {
    double a = *alpha, hh = *h, ww = *w;
    if (hh < ww) {
        double t = hh;
        hh = ww;
        ww = t;
        a = a + M_PI_2;
    }
    *alpha = rk_angle_mod_pi(a);
    *h = hh;
    *w = ww;
}

/* Grid-sampled IoU estimate.
 *
 * An n x n lattice of cell centers in [-0.5, 0.5]^2 is scaled by
 * diag(w1, h1), rotated by M(a1) and shifted to (x1, y1), so the points
 * tile the first rectangle.  Points and the second center are then rotated
 * by M(-a2), which axis-aligns the second rectangle; points inside it
 * (boundary inclusive) are counted.  The intersection estimate is
 * h1*w1*count/n^2 and IoU = I / (h1*w1 + h2*w2 - I). */
static inline double rk_fast_iou(double x1, double y1, double a1, double h1, double w1,
                                 double x2, double y2, double a2, double h2, double w2,
                                 int n) {
    double c1 = cos(a1), s1 = sin(a1);
    double c2 = cos(a2), s2 = sin(a2);
    double u = c2 * x2 + s2 * y2;
    double v = c2 * y2 - s2 * x2;
    double ex = 0.5 * w2;
    double ey = 0.5 * h2;
    long cnt = 0;
    int ix, iy;
    for (iy = 0; iy < n; iy++) {
        double gy = ((double)iy + 0.5) / (double)n - 0.5;
        double sy = h1 * gy;
        for (ix = 0; ix < n; ix++) {
            double gx = ((double)ix + 0.5) / (double)n - 0.5;
            double sx = w1 * gx;
            double px = x1 + (c1 * sx - s1 * sy);
            double py = y1 + (s1 * sx + c1 * sy);
            double qx = c2 * px + s2 * py;
            double qy = c2 * py - s2 * px;
            double dx = qx - u;
            double dy = qy - v;
            if (dx < 0.0) dx = -dx;
            if (dy < 0.0) dy = -dy;
            if (dx <= ex && dy <= ey) cnt++;
        }
    }
    if (cnt == 0) return 0.0;
    double nn = (double)n * (double)n;
    double inter = h1 * w1 * (double)cnt / nn;
    double denom = h1 * w1 + h2 * w2 - inter;
    return inter / denom;
}

/* Corners in counter-clockwise order (y-up convention). */
static inline void rk_corners(double x, double y, double a, double h, double w,
                              double *px, double *py) {
    double c = cos(a), s = sin(a);
    double ex = 0.5 * w;
    double ey = 0.5 * h;
    double lx[4], ly[4];
    int i;
    lx[0] = ex;  ly[0] = ey;
    lx[1] = -ex; ly[1] = ey;
    lx[2] = -ex; ly[2] = -ey;
    lx[3] = ex;  ly[3] = -ey;
    for (i = 0; i < 4; i++) {
        px[i] = x + (c * lx[i] - s * ly[i]);
        py[i] = y + (s * lx[i] + c * ly[i]);
    }
}

/* Exact IoU via Sutherland-Hodgman clipping of rectangle 1 against the four
 * half-planes of rectangle 2, then the shoelace area.  Both rectangles are
 * translated by -(x1, y1) first, which keeps the shoelace well conditioned.
 * Intersections below 1e-12 px^2 are reported as zero (shoelace sign noise).
 */
static inline double rk_exact_iou(double x1, double y1, double a1, double h1, double w1,
                                  double x2, double y2, double a2, double h2, double w2) {
    /* worst-case vertex growth is 2x per clip; 4 -> 64 bounds the buffers */
    double subx[64], suby[64], outx[64], outy[64];
    double clipx[4], clipy[4];
    int m = 4, e, i, j, k;
    rk_corners(0.0, 0.0, a1, h1, w1, subx, suby);
    rk_corners(x2 - x1, y2 - y1, a2, h2, w2, clipx, clipy);
    for (e = 0; e < 4 && m > 0; e++) {
        double ax = clipx[e], ay = clipy[e];
        double bx = clipx[(e + 1) & 3], by = clipy[(e + 1) & 3];
        double edx = bx - ax, edy = by - ay;
        k = 0;
        for (i = 0; i < m; i++) {
            j = (i == 0) ? m - 1 : i - 1;
            double cx = subx[i], cy = suby[i];
            double qx = subx[j], qy = suby[j];
            double dcur = edx * (cy - ay) - edy * (cx - ax);
            double dprev = edx * (qy - ay) - edy * (qx - ax);
            if (dcur >= 0.0) {
                if (!(dprev >= 0.0)) {
                    double t = dprev / (dprev - dcur);
                    outx[k] = qx + t * (cx - qx);
                    outy[k] = qy + t * (cy - qy);
                    k++;
                }
                outx[k] = cx;
                outy[k] = cy;
                k++;
            } else if (dprev >= 0.0) {
                double t = dprev / (dprev - dcur);
                outx[k] = qx + t * (cx - qx);
                outy[k] = qy + t * (cy - qy);
                k++;
            }
        }
        for (i = 0; i < k; i++) {
            subx[i] = outx[i];
            suby[i] = outy[i];
        }
        m = k;
    }
    double s = 0.0;
    for (i = 0; i < m; i++) {
        j = (i + 1 == m) ? 0 : i + 1;
        s += subx[i] * suby[j] - subx[j] * suby[i];
    }
    double inter = 0.5 * s;
    if (inter < 0.0) inter = -inter;
    if (inter < 1e-12) inter = 0.0;
    double denom = h1 * w1 + h2 * w2 - inter;
    double iou = inter / denom;
    if (iou < 0.0) iou = 0.0;
    if (iou > 1.0) iou = 1.0;
    return iou;
}

/* Box-to-anchor offsets: centers normalized by the crossed anchor side
 * (x by w_a, y by h_a), log side ratios, raw angle difference.
 * Output order matches the box layout: (tx, ty, talpha, th, tw). */
static inline void rk_encode(double xa, double ya, double aa, double ha, double wa,
                             double xg, double yg, double ag, double hg, double wg,
                             double *t) {
    t[0] = (xg - xa) / wa;
    t[1] = (yg - ya) / ha;
    t[2] = ag - aa;
    t[3] = log(hg / ha);
    t[4] = log(wg / wa);
}

/* Inverse of rk_encode followed by canonicalization.  Returns 0 on success,
 * -1 for deltas that are non-finite or whose log side ratios exceed 20
 * (exp would overflow long before that ratio is meaningful). */
static inline int rk_decode(double xa, double ya, double aa, double ha, double wa,
                            double tx, double ty, double ta, double th, double tw,
                            double *out) {
    if (!(isfinite(tx) && isfinite(ty) && isfinite(ta) && isfinite(th) && isfinite(tw)))
        return -1;
    if (th > 20.0 || th < -20.0 || tw > 20.0 || tw < -20.0)
        return -1;
    double x = xa + tx * wa;
    double y = ya + ty * ha;
    double a = aa + ta;
    double h = ha * exp(th);
    double w = wa * exp(tw);
    if (!(isfinite(x) && isfinite(y) && isfinite(h) && isfinite(w)) || h <= 0.0 || w <= 0.0)
        return -1;
    rk_canon(&a, &h, &w);
    out[0] = x;
    out[1] = y;
    out[2] = a;
    out[3] = h;
    out[4] = w;
    return 0;
}

#endif /* ROTRECT_KERNELS_H */
