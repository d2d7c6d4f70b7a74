#pragma once
#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace soslab {

/* Primal cells sit at integer coordinates; heights live on cells.
   Dual vertices sit at half-integer points: DualVertex{a,b} is (a+1/2, b+1/2).
   A dual edge goes E (dir=0, to (a+1,b)) or N (dir=1, to (a,b+1)). */

struct Cell {
    int x = 0, y = 0;
    auto operator<=>(const Cell&) const = default;
};

struct DualVertex {
    int a = 0, b = 0;
    auto operator<=>(const DualVertex&) const = default;
};

struct Edge {
    int a = 0, b = 0;
    int dir = 0;  // 0 = E, 1 = N
    auto operator<=>(const Edge&) const = default;
};

// direction codes of the four edges around a dual vertex
enum Dir : int { DIR_E = 0, DIR_N = 1, DIR_W = 2, DIR_S = 3 };

// the splitting rule: {N,W} and {S,E} are the linked pairs
// (the two edges on the same side of the +pi/4 line through the vertex)
inline bool linkedDirs(int d1, int d2) { return d1 != d2 && d1 + d2 == 3; }

inline Edge edgeAt(DualVertex v, int d) {
    switch (d) {
        case DIR_E: return {v.a, v.b, 0};
        case DIR_N: return {v.a, v.b, 1};
        case DIR_W: return {v.a - 1, v.b, 0};
        default:    return {v.a, v.b - 1, 1};
    }
}

inline std::array<DualVertex, 2> edgeEndpoints(const Edge& e) {
    if (e.dir == 0) return {DualVertex{e.a, e.b}, DualVertex{e.a + 1, e.b}};
    return {DualVertex{e.a, e.b}, DualVertex{e.a, e.b + 1}};
}

// the two primal cells an edge separates
inline std::array<Cell, 2> edgeCells(const Edge& e) {
    if (e.dir == 0) return {Cell{e.a + 1, e.b}, Cell{e.a + 1, e.b + 1}};
    return {Cell{e.a, e.b + 1}, Cell{e.a + 1, e.b + 1}};
}

// direction code of edge e as seen from endpoint v (v must be an endpoint)
inline int dirFrom(DualVertex v, const Edge& e) {
    if (e.dir == 0) return (e.a == v.a) ? DIR_E : DIR_W;
    return (e.b == v.b) ? DIR_N : DIR_S;
}

// the four cells touching a dual vertex (distance 1/sqrt(2))
inline std::array<Cell, 4> cellsAround(DualVertex v) {
    return {Cell{v.a, v.b}, Cell{v.a + 1, v.b}, Cell{v.a, v.b + 1}, Cell{v.a + 1, v.b + 1}};
}

struct CellHash {
    size_t operator()(const Cell& c) const {
        uint64_t k = (uint64_t(uint32_t(c.x)) << 32) | uint32_t(c.y);
        k ^= k >> 33; k *= 0xff51afd7ed558ccdULL; k ^= k >> 33;
        return size_t(k);
    }
};
struct DualVertexHash {
    size_t operator()(const DualVertex& v) const {
        return CellHash{}(Cell{v.a, v.b}) * 0x9e3779b97f4a7c15ULL;
    }
};
struct EdgeHash {
    size_t operator()(const Edge& e) const {
        return CellHash{}(Cell{e.a, e.b}) ^ (uint64_t(e.dir) << 1);
    }
};

}  // namespace soslab
