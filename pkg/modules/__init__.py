# /thetaflex/modules/__init__.py
# Moduły funkcjonalne laboratorium Thetaflex
