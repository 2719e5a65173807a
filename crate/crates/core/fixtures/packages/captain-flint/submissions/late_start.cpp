#include <bits/stdc++.h>
using namespace std;

int main() {
    int t;
    cin >> t;
    while (t--) {
        int n;
        cin >> n;
        if (n <= 31) {
            cout << "NO\n";
            continue;
        }
        int x = n - 30;
        if (x == 6 || x == 10 || x == 14) cout << "YES\n6 10 15 " << n - 31 << "\n";
        else cout << "YES\n6 10 14 " << x << "\n";
    }
}
