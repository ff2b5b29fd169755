"""工作空间分析模块"""
