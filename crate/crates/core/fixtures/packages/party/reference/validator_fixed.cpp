#include "testlib.h"
#include <bits/stdc++.h>
using namespace std;
int main(int argc, char* argv[]) {
    registerValidation(argc, argv);
    int n = inf.readInt(2, 2000, "n");
    inf.readEoln();
    int64_t max_edges = min(int64_t(100000), int64_t(n) * (n - 1) / 2);
    int k = inf.readInt(0, max_edges, "k");
    inf.readEoln();
    set<pair<int,int>> friendship_pairs;
    for (int i = 0; i < k; i++) {
        int u = inf.readInt(1, n, "u_i");
        inf.readSpace();
        int v = inf.readInt(1, n, "v_i");
        inf.readEoln();
        ensuref(u != v, "A person cannot be friends with themselves: u=%d", u);
        int x = min(u, v);
        int y = max(u, v);
        pair<int,int> p = make_pair(x, y);
        ensuref(friendship_pairs.count(p) == 0, "Duplicate friendship pair (%d, %d)", x, y);
        friendship_pairs.insert(p);
    }
    int m = inf.readInt(0, max_edges, "m");
    inf.readEoln();
    set<pair<int,int>> dislike_pairs;
    for (int i = 0; i < m; i++) {
        int u = inf.readInt(1, n, "u_i");
        inf.readSpace();
        int v = inf.readInt(1, n, "v_i");
        inf.readEoln();
        ensuref(u != v, "A person cannot dislike themselves: u=%d", u);
        int x = min(u, v);
        int y = max(u, v);
        pair<int,int> p = make_pair(x, y);
        ensuref(dislike_pairs.count(p) == 0, "Duplicate dislike pair (%d, %d)", x, y);
        ensuref(friendship_pairs.count(p) == 0, "Pair (%d, %d) are both friends and enemies", x, y);
        dislike_pairs.insert(p);
    }
    inf.readEof();
    return 0;
}
