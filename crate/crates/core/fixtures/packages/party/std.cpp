#include <bits/stdc++.h>
using namespace std;

vector<int> parent, sz;
int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }

int main() {
    int n, k;
    scanf("%d %d", &n, &k);
    parent.resize(n + 1);
    sz.assign(n + 1, 1);
    iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < k; i++) {
        int u, v;
        scanf("%d %d", &u, &v);
        u = find(u), v = find(v);
        if (u != v) parent[u] = v, sz[v] += sz[u];
    }
    int m;
    scanf("%d", &m);
    vector<char> spoiled(n + 1, 0);
    for (int i = 0; i < m; i++) {
        int u, v;
        scanf("%d %d", &u, &v);
        if (find(u) == find(v)) spoiled[find(u)] = 1;
    }
    int best = 0;
    for (int v = 1; v <= n; v++)
        if (find(v) == v && !spoiled[v]) best = max(best, sz[v]);
    printf("%d\n", best);
}
