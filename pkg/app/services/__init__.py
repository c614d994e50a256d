# Counting, asymptotics and sampling services
