# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
# distutils: language = c++
"""Compiled triangulation kernel.

Mirror of `thuelab._core_py`: identical algorithms and identical
floating-point evaluation order, so both backends produce bit-identical
triangulations. The exact (rational) predicate fallback is shared with the
pure-Python kernel via `thuelab._exact`; it is only reached when the float
filter cannot certify a sign.
"""

from libc.math cimport ldexp
from libcpp.vector cimport vector

from thuelab import _exact as _exact_mod

BACKEND_NAME = "cython"

cdef object _exact_orient2d = _exact_mod.orient2d
cdef object _exact_incircle = _exact_mod.incircle

cdef double _EPSILON = ldexp(1.0, -53)
cdef double _CCW_ERRBOUND = (3.0 + 16.0 * _EPSILON) * _EPSILON
cdef double _ICC_ERRBOUND = (10.0 + 96.0 * _EPSILON) * _EPSILON


cdef int _orient2d(double ax, double ay, double bx, double by,
                   double cx, double cy) except? -9:
    cdef double detleft = (ax - cx) * (by - cy)
    cdef double detright = (ay - cy) * (bx - cx)
    cdef double det = detleft - detright
    cdef double detsum, errbound

    if detleft > 0.0:
        if detright <= 0.0:
            return (det > 0.0) - (det < 0.0)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return (det > 0.0) - (det < 0.0)
        detsum = -detleft - detright
    else:
        return (detright < 0.0) - (detright > 0.0)

    errbound = _CCW_ERRBOUND * detsum
    if det >= errbound or -det >= errbound:
        return (det > 0.0) - (det < 0.0)
    return _exact_orient2d(ax, ay, bx, by, cx, cy)


cdef int _incircle(double ax, double ay, double bx, double by,
                   double cx, double cy, double dx, double dy) except? -9:
    cdef double adx = ax - dx
    cdef double bdx = bx - dx
    cdef double cdx = cx - dx
    cdef double ady = ay - dy
    cdef double bdy = by - dy
    cdef double cdy = cy - dy

    cdef double bdxcdy = bdx * cdy
    cdef double cdxbdy = cdx * bdy
    cdef double alift = adx * adx + ady * ady

    cdef double cdxady = cdx * ady
    cdef double adxcdy = adx * cdy
    cdef double blift = bdx * bdx + bdy * bdy

    cdef double adxbdy = adx * bdy
    cdef double bdxady = bdx * ady
    cdef double clift = cdx * cdx + cdy * cdy

    cdef double det = (
        alift * (bdxcdy - cdxbdy)
        + blift * (cdxady - adxcdy)
        + clift * (adxbdy - bdxady)
    )
    cdef double permanent = (
        ((bdxcdy if bdxcdy >= 0 else -bdxcdy) + (cdxbdy if cdxbdy >= 0 else -cdxbdy)) * alift
        + ((cdxady if cdxady >= 0 else -cdxady) + (adxcdy if adxcdy >= 0 else -adxcdy)) * blift
        + ((adxbdy if adxbdy >= 0 else -adxbdy) + (bdxady if bdxady >= 0 else -bdxady)) * clift
    )
    cdef double errbound = _ICC_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return (det > 0.0) - (det < 0.0)
    return _exact_incircle(ax, ay, bx, by, cx, cy, dx, dy)


def orient2d(double ax, double ay, double bx, double by, double cx, double cy):
    """Sign of det(b - a, c - a): +1 if (a,b,c) is CCW, -1 if CW, 0 collinear."""
    return _orient2d(ax, ay, bx, by, cx, cy)


def incircle(double ax, double ay, double bx, double by,
             double cx, double cy, double dx, double dy):
    """+1 iff d strictly inside the circumcircle of CCW (a,b,c); exact sign."""
    return _incircle(ax, ay, bx, by, cx, cy, dx, dy)


cdef struct BEdge:
    int a
    int b
    int outer
    int slot  # index inside `outer` pointing back at the cavity


cdef class Triangulator:
    """Incremental Bowyer-Watson Delaunay triangulation with exact predicates.

    Same contract as `thuelab._core_py.Triangulator`.
    """

    cdef vector[double] px, py
    cdef vector[int] tv, tn
    cdef vector[char] alive
    cdef vector[int] free_list
    cdef vector[long long] mark
    cdef vector[BEdge] boundary
    cdef vector[int] cavity, stack, order, new_ids
    cdef long long stamp
    cdef int hint

    def __init__(self, bounds):
        minx, miny, maxx, maxy = bounds
        if not (minx <= maxx and miny <= maxy):
            raise ValueError("empty bounds")
        cdef double cx = 0.5 * (<double> minx + <double> maxx)
        cdef double cy = 0.5 * (<double> miny + <double> maxy)
        cdef double hx = 0.5 * (<double> maxx - <double> minx)
        cdef double hy = 0.5 * (<double> maxy - <double> miny)
        cdef double halfspan = hx if hx > hy else hy
        cdef double d = 4096.0 * (halfspan + 1.0)
        self.px.push_back(cx - d)
        self.px.push_back(cx + d)
        self.px.push_back(cx)
        self.py.push_back(cy - d)
        self.py.push_back(cy - d)
        self.py.push_back(cy + d)
        self.tv.push_back(0)
        self.tv.push_back(1)
        self.tv.push_back(2)
        self.tn.push_back(-1)
        self.tn.push_back(-1)
        self.tn.push_back(-1)
        self.alive.push_back(1)
        self.mark.push_back(0)
        self.stamp = 0
        self.hint = 0

    @property
    def num_points(self):
        return self.px.size() - 3

    def point(self, int i):
        return self.px[i + 3], self.py[i + 3]

    def super_vertices(self):
        return [(self.px[k], self.py[k]) for k in range(3)]

    def triangles(self):
        cdef int t, a, b, c
        out = []
        for t in range(<int> self.alive.size()):
            if not self.alive[t]:
                continue
            a = self.tv[3 * t]
            b = self.tv[3 * t + 1]
            c = self.tv[3 * t + 2]
            if a < 3 or b < 3 or c < 3:
                continue
            out.append((a - 3, b - 3, c - 3))
        return out

    def add_point(self, double x, double y):
        cdef int pid = <int> self.px.size()
        cdef int t0 = self._locate(x, y)
        self.px.push_back(x)
        self.py.push_back(y)
        self._insert(pid, x, y, t0)
        return pid - 3

    def add_points(self, xs, ys):
        for x, y in zip(xs, ys):
            self.add_point(x, y)

    cdef int _locate(self, double x, double y) except -1:
        cdef int t = self.hint
        cdef int v0, v1, v2, base
        cdef long long steps = 0
        while True:
            steps += 1
            if steps > (1 << 22):
                raise RuntimeError("point location walk did not terminate")
            base = 3 * t
            v0 = self.tv[base]
            v1 = self.tv[base + 1]
            v2 = self.tv[base + 2]
            if _orient2d(self.px[v0], self.py[v0], self.px[v1], self.py[v1], x, y) < 0:
                t = self.tn[base + 2]
            elif _orient2d(self.px[v1], self.py[v1], self.px[v2], self.py[v2], x, y) < 0:
                t = self.tn[base]
            elif _orient2d(self.px[v2], self.py[v2], self.px[v0], self.py[v0], x, y) < 0:
                t = self.tn[base + 1]
            else:
                return t
            if t < 0:
                raise ValueError("point lies outside the triangulation bounds")

    cdef int _in_circum(self, int t, double x, double y) except? -9:
        cdef int base = 3 * t
        cdef int a = self.tv[base]
        cdef int b = self.tv[base + 1]
        cdef int c = self.tv[base + 2]
        return _incircle(self.px[a], self.py[a], self.px[b], self.py[b],
                         self.px[c], self.py[c], x, y)

    cdef int _back_slot(self, int outer, int owner) except -1:
        cdef int obase = 3 * outer
        cdef int j
        for j in range(3):
            if self.tn[obase + j] == owner:
                return j
        raise RuntimeError("adjacency invariant broken")

    cdef int _insert(self, int pid, double x, double y, int t0) except -1:
        cdef int t, n, k, base, ea, eb, v0, v1, v2
        cdef int i, j, idx, nb, pos, nnew, outer
        cdef long long m
        cdef BEdge edge

        if self._in_circum(t0, x, y) <= 0:
            raise ValueError("degenerate insertion (duplicate point?)")

        self.stamp += 2
        cdef long long stamp = self.stamp
        self.mark[t0] = stamp + 1
        self.stack.clear()
        self.cavity.clear()
        self.boundary.clear()
        self.stack.push_back(t0)
        self.cavity.push_back(t0)
        while self.stack.size() > 0:
            t = self.stack.back()
            self.stack.pop_back()
            base = 3 * t
            v0 = self.tv[base]
            v1 = self.tv[base + 1]
            v2 = self.tv[base + 2]
            for k in range(3):
                if k == 0:
                    ea = v1
                    eb = v2
                elif k == 1:
                    ea = v2
                    eb = v0
                else:
                    ea = v0
                    eb = v1
                n = self.tn[base + k]
                if n < 0:
                    edge.a = ea
                    edge.b = eb
                    edge.outer = -1
                    edge.slot = -1
                    self.boundary.push_back(edge)
                    continue
                m = self.mark[n]
                if m == stamp + 1:
                    continue
                if m == stamp:
                    edge.a = ea
                    edge.b = eb
                    edge.outer = n
                    edge.slot = self._back_slot(n, t)
                    self.boundary.push_back(edge)
                    continue
                if self._in_circum(n, x, y) > 0:
                    self.mark[n] = stamp + 1
                    self.stack.push_back(n)
                    self.cavity.push_back(n)
                else:
                    self.mark[n] = stamp
                    edge.a = ea
                    edge.b = eb
                    edge.outer = n
                    edge.slot = self._back_slot(n, t)
                    self.boundary.push_back(edge)

        # Chain the boundary edges into the single simple cycle they must form.
        nb = <int> self.boundary.size()
        self.order.clear()
        cdef int v = self.boundary[0].a
        cdef int first = v
        cdef int found
        cdef vector[char] used = vector[char](nb, <char> 0)
        for i in range(nb):
            found = -1
            for j in range(nb):
                if self.boundary[j].a == v:
                    if found >= 0:
                        raise RuntimeError("pinched cavity boundary")
                    found = j
            if found < 0 or used[found]:
                raise RuntimeError("cavity boundary is not a single cycle")
            used[found] = 1
            self.order.push_back(found)
            v = self.boundary[found].b
        if v != first:
            raise RuntimeError("cavity boundary is not a single cycle")

        for i in range(<int> self.cavity.size()):
            t = self.cavity[i]
            self.alive[t] = 0
            self.free_list.push_back(t)

        self.new_ids.clear()
        for pos in range(nb):
            idx = self.order[pos]
            ea = self.boundary[idx].a
            eb = self.boundary[idx].b
            if self.free_list.size() > 0:
                t = self.free_list.back()
                self.free_list.pop_back()
                base = 3 * t
                self.tv[base] = pid
                self.tv[base + 1] = ea
                self.tv[base + 2] = eb
                self.alive[t] = 1
                self.mark[t] = 0
            else:
                t = <int> self.alive.size()
                self.tv.push_back(pid)
                self.tv.push_back(ea)
                self.tv.push_back(eb)
                self.tn.push_back(-1)
                self.tn.push_back(-1)
                self.tn.push_back(-1)
                self.alive.push_back(1)
                self.mark.push_back(0)
            self.new_ids.push_back(t)

        nnew = <int> self.new_ids.size()
        for pos in range(nnew):
            idx = self.order[pos]
            outer = self.boundary[idx].outer
            t = self.new_ids[pos]
            base = 3 * t
            self.tn[base] = outer
            self.tn[base + 1] = self.new_ids[(pos + 1) % nnew]
            self.tn[base + 2] = self.new_ids[(pos + nnew - 1) % nnew]
            if outer >= 0:
                self.tn[3 * outer + self.boundary[idx].slot] = t
        self.hint = self.new_ids[nnew - 1]
        return 0
