# -*- coding: utf-8 -*-
"""
Capa física simulada
"""
