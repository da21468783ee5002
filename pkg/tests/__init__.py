# Tests package for cipwave
